#pragma once

// Thin RAII wrapper over FFTW for square 2D complex transforms.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "expkin/error.hpp"

namespace expkin {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// In-place n x n complex FFT with its own buffer. Unnormalized in both directions.
/// Planned with FFTW_ESTIMATE so repeated runs pick the same algorithm.
class Fft2d {
 public:
  explicit Fft2d(int n) : n_(n) {
    if (n <= 0) throw config_error("FFT size must be positive");
    buffer_ = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    if (buffer_ == nullptr) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int n() const noexcept { return n_; }
  std::span<std::complex<double>> data() noexcept {
    return {reinterpret_cast<std::complex<double>*>(buffer_), static_cast<std::size_t>(n_) * n_};
  }

  /// buffer <- sum_n buffer_n exp(-2 pi i k.n / N)
  void forward() noexcept { fftw_execute(forward_); }
  /// buffer <- sum_k buffer_k exp(+2 pi i k.n / N)
  void backward() noexcept { fftw_execute(backward_); }

  /// Per-thread cached transform of size n.
  static Fft2d& cached(int n) {
    thread_local std::map<int, std::unique_ptr<Fft2d>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fft2d>(n);
    return *slot;
  }

 private:
  int n_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

inline bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace expkin
