#pragma once

// Collision operators Q(f): BGK relaxation and the 2D Maxwell-molecule
// Boltzmann operator, the latter in two evaluations that compute the same
// truncated Fourier-Galerkin sum (FFT-accelerated and brute force).
//
// The Boltzmann operator uses the Carleman form with the kernel constant
// B = S/(2 pi) on the unit circle, which in Carleman variables reads
//   Q(f)(v) = S/pi * int_0^pi dtheta int_{-R}^{R} da int_{-R}^{R} db
//             [f(v + a e) f(v + b e_perp) - f(v) f(v + a e + b e_perp)].
// Projected on the Fourier modes xi_l = pi l / L of [-L, L]^2 this becomes
//   Qhat_k = sum_{l+m=k} fhat_l fhat_m (G(l, m) - G(m, m)),
//   G(l, m) = S/M sum_p phi(xi_l . e_p) phi(xi_m . e_p_perp),
// with the midpoint angular rule theta_p = (p + 1/2) pi / M and
// phi(s) = 2 sin(R s) / s. The separability in (l, m) for each angle is what
// lets the fast path use FFT convolutions.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <tuple>
#include <variant>
#include <vector>

#include "expkin/error.hpp"
#include "expkin/fft.hpp"
#include "expkin/parallel.hpp"
#include "expkin/phase_space.hpp"

namespace expkin {

/// BGK relaxation Q = rate * (M[f] - f).
struct Bgk {
  double rate = 1.0;
};

/// Maxwell molecules, FFT-accelerated spectral evaluation. Nv must be a power of two.
struct SpectralMaxwell {
  double kernel = 1.0;  ///< S, the angular integral of B
  int n_angle = 16;
};

/// Same truncated sum as SpectralMaxwell, evaluated by O(Nv^4 * n_angle) brute force.
struct DirectSumMaxwell {
  double kernel = 1.0;
  int n_angle = 16;
};

using CollisionOperator = std::variant<Bgk, SpectralMaxwell, DirectSumMaxwell>;

/// Ratio of the assumed distribution support radius to the cutoff L, chosen so
/// that the periodized collision integral sees no aliased copies.
inline constexpr double kSupportFraction = 2.0 / (3.0 + std::numbers::sqrt2);

/// Carleman truncation radius R = sqrt(2) * support radius.
inline double truncation_radius(const VelocityGrid& vg) {
  return std::numbers::sqrt2 * kSupportFraction * vg.cutoff();
}

inline void validate(const CollisionOperator& op) {
  std::visit(
      [](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Bgk>) {
          if (!(o.rate > 0.0)) throw config_error("BGK rate must be positive");
        } else {
          if (!(o.kernel > 0.0)) throw config_error("collision kernel constant must be positive");
          if (o.n_angle <= 0) throw config_error("angular node count must be positive");
        }
      },
      op);
}

inline std::string name_of(const CollisionOperator& op) {
  switch (op.index()) {
    case 0: return "bgk";
    case 1: return "spectral";
    default: return "direct";
  }
}

namespace spectral {

using cplx = std::complex<double>;

/// Signed wavenumber of FFT index idx for length n; idx == n/2 maps to -n/2.
inline int signed_mode(int idx, int n) noexcept { return idx < n / 2 ? idx : idx - n; }
/// The retained band excludes the Nyquist mode so the band is symmetric.
inline bool in_band(int l, int n) noexcept { return 2 * std::abs(l) < n; }
inline int wrap(int l, int n) noexcept { return ((l % n) + n) % n; }

/// phi(s) = int_{-R}^{R} exp(i a s) da.
inline double window(double s, double R) noexcept {
  const double x = R * s;
  if (std::abs(x) < 1e-4) return 2.0 * R * (1.0 - x * x / 6.0);
  return 2.0 * std::sin(x) / s;
}

inline double angle(int p, int n_angle) noexcept { return (p + 0.5) * std::numbers::pi / n_angle; }

/// Precomputed kernel tables for one (grid, kernel, angle count) triple.
struct Tables {
  int n = 0;
  int nf = 0;  ///< zero-padded grid size used for the products
  double cutoff = 0;
  double radius = 0;
  double kernel = 0;
  int n_angle = 0;
  std::vector<cplx> phase;      ///< per-dimension phase s_l of the cell-centered DFT
  std::vector<double> gain_e;   ///< phi(xi_l . e_p), [p][ix][iy] in n-grid FFT order
  std::vector<double> gain_ep;  ///< phi(xi_l . e_p_perp)
  std::vector<double> loss;     ///< G(l, l)

  std::size_t at(int ix, int iy) const noexcept { return static_cast<std::size_t>(ix) * n + iy; }
  double xi(int l) const noexcept { return std::numbers::pi * l / cutoff; }
};

inline Tables build_tables(const VelocityGrid& vg, double kernel, int n_angle) {
  Tables t;
  t.n = vg.n();
  t.nf = 2 * vg.n();
  t.cutoff = vg.cutoff();
  t.radius = truncation_radius(vg);
  t.kernel = kernel;
  t.n_angle = n_angle;
  const int n = t.n;
  t.phase.resize(n);
  for (int idx = 0; idx < n; ++idx) {
    const int l = signed_mode(idx, n);
    t.phase[idx] = std::polar(1.0, std::numbers::pi * l * (1.0 - 1.0 / n));
  }
  const std::size_t block = static_cast<std::size_t>(n) * n;
  t.gain_e.assign(block * n_angle, 0.0);
  t.gain_ep.assign(block * n_angle, 0.0);
  t.loss.assign(block, 0.0);
  for (int p = 0; p < n_angle; ++p) {
    const double th = angle(p, n_angle);
    const double ex = std::cos(th), ey = std::sin(th);
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double kx = t.xi(signed_mode(ix, n)), ky = t.xi(signed_mode(iy, n));
        const double a = window(kx * ex + ky * ey, t.radius);
        const double b = window(-kx * ey + ky * ex, t.radius);
        t.gain_e[p * block + t.at(ix, iy)] = a;
        t.gain_ep[p * block + t.at(ix, iy)] = b;
        t.loss[t.at(ix, iy)] += kernel / n_angle * a * b;
      }
  }
  return t;
}

inline const Tables& tables(const VelocityGrid& vg, double kernel, int n_angle) {
  thread_local std::map<std::tuple<int, double, double, int>, Tables> cache;
  const auto key = std::make_tuple(vg.n(), vg.cutoff(), kernel, n_angle);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_tables(vg, kernel, n_angle)).first;
  return it->second;
}

/// Normalized coefficients fhat_l with f(v) = sum_l fhat_l exp(i xi_l . v),
/// in n-grid FFT order; Nyquist modes are zeroed.
inline void coefficients(std::span<const double> block, const Tables& t, std::span<cplx> out) {
  const int n = t.n;
  Fft2d& fft = Fft2d::cached(n);
  auto buf = fft.data();
  for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = block[k];
  fft.forward();
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      const bool keep = in_band(signed_mode(ix, n), n) && in_band(signed_mode(iy, n), n);
      out[t.at(ix, iy)] = keep ? buf[t.at(ix, iy)] * t.phase[ix] * t.phase[iy] * scale : cplx{};
    }
}

/// Evaluates sum_k c_k exp(i xi_k . v_j) at the cell-centered nodes (real part).
inline void evaluate(std::span<const cplx> coeffs, const Tables& t, std::span<double> out) {
  const int n = t.n;
  Fft2d& fft = Fft2d::cached(n);
  auto buf = fft.data();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      buf[t.at(ix, iy)] = coeffs[t.at(ix, iy)] * std::conj(t.phase[ix] * t.phase[iy]);
  fft.backward();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = buf[k].real();
}

enum class Part { Full, GainOnly };

/// FFT-accelerated evaluation on one velocity block.
inline void collide_fast(std::span<const double> block, const Tables& t, Part part, std::span<double> out) {
  const int n = t.n, nf = t.nf;
  const std::size_t nb = static_cast<std::size_t>(n) * n;
  const std::size_t fb = static_cast<std::size_t>(nf) * nf;
  thread_local std::vector<cplx> fhat, qhat;
  thread_local std::vector<double> first, product;
  fhat.resize(nb);
  qhat.resize(nb);
  first.resize(fb);
  product.resize(fb);
  coefficients(block, t, fhat);

  Fft2d& fine = Fft2d::cached(nf);
  auto buf = fine.data();
  // Fine-grid nodes w_n = -L + n dv/2 turn exp(i xi_l . w_n) into (-1)^{lx+ly} e^{2 pi i l.n / nf}.
  auto to_fine = [&](auto&& coeff) {
    std::fill(buf.begin(), buf.end(), cplx{});
    for (int ix = 0; ix < n; ++ix) {
      const int lx = signed_mode(ix, n);
      if (!in_band(lx, n)) continue;
      for (int iy = 0; iy < n; ++iy) {
        const int ly = signed_mode(iy, n);
        if (!in_band(ly, n)) continue;
        const double sign = ((lx + ly) & 1) ? -1.0 : 1.0;
        buf[static_cast<std::size_t>(wrap(lx, nf)) * nf + wrap(ly, nf)] =
            sign * coeff(t.at(ix, iy)) * fhat[t.at(ix, iy)];
      }
    }
    fine.backward();
  };

  std::fill(product.begin(), product.end(), 0.0);
  const double w = t.kernel / t.n_angle;
  for (int p = 0; p < t.n_angle; ++p) {
    const double* ge = t.gain_e.data() + p * nb;
    const double* gp = t.gain_ep.data() + p * nb;
    to_fine([&](std::size_t k) { return ge[k]; });
    for (std::size_t k = 0; k < fb; ++k) first[k] = buf[k].real();
    to_fine([&](std::size_t k) { return gp[k]; });
    for (std::size_t k = 0; k < fb; ++k) product[k] += w * first[k] * buf[k].real();
  }
  if (part == Part::Full) {
    to_fine([&](std::size_t k) { return t.loss[k]; });
    for (std::size_t k = 0; k < fb; ++k) first[k] = buf[k].real();
    to_fine([](std::size_t) { return 1.0; });
    for (std::size_t k = 0; k < fb; ++k) product[k] -= first[k] * buf[k].real();
  }

  for (std::size_t k = 0; k < fb; ++k) buf[k] = product[k];
  fine.forward();
  const double scale = 1.0 / static_cast<double>(fb);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      const int kx = signed_mode(ix, n), ky = signed_mode(iy, n);
      if (!in_band(kx, n) || !in_band(ky, n)) {
        qhat[t.at(ix, iy)] = cplx{};
        continue;
      }
      const double sign = ((kx + ky) & 1) ? -1.0 : 1.0;
      qhat[t.at(ix, iy)] = sign * scale * buf[static_cast<std::size_t>(wrap(kx, nf)) * nf + wrap(ky, nf)];
    }
  evaluate(qhat, t, out);
}

/// Brute-force evaluation of the same truncated sum. Every transform is an
/// explicit sum and the kernel is recomputed from its angular quadrature.
inline void collide_direct(std::span<const double> block, const VelocityGrid& vg, double kernel, int n_angle,
                           Part part, std::span<double> out) {
  const int n = vg.n();
  const double L = vg.cutoff();
  const double R = truncation_radius(vg);
  const int lo = -(n / 2 - 1), hi = n / 2 - 1;  // symmetric band, Nyquist excluded
  const int nb = hi - lo + 1;
  auto xi = [&](int l) { return std::numbers::pi * l / L; };
  auto band_at = [&](int lx, int ly) { return static_cast<std::size_t>(lx - lo) * nb + (ly - lo); };

  std::vector<cplx> fhat(static_cast<std::size_t>(nb) * nb);
  for (int lx = lo; lx <= hi; ++lx)
    for (int ly = lo; ly <= hi; ++ly) {
      cplx s{};
      for (int jx = 0; jx < n; ++jx)
        for (int jy = 0; jy < n; ++jy)
          s += block[static_cast<std::size_t>(jx) * n + jy] *
               std::polar(1.0, -(xi(lx) * vg.node(jx) + xi(ly) * vg.node(jy)));
      fhat[band_at(lx, ly)] = s / (static_cast<double>(n) * n);
    }

  auto kernel_mode = [&](int lx, int ly, int mx, int my) {
    double g = 0.0;
    for (int p = 0; p < n_angle; ++p) {
      const double th = angle(p, n_angle);
      const double ex = std::cos(th), ey = std::sin(th);
      g += window(xi(lx) * ex + xi(ly) * ey, R) * window(-xi(mx) * ey + xi(my) * ex, R);
    }
    return kernel / n_angle * g;
  };

  std::vector<double> loss(fhat.size());
  for (int mx = lo; mx <= hi; ++mx)
    for (int my = lo; my <= hi; ++my) loss[band_at(mx, my)] = kernel_mode(mx, my, mx, my);

  std::vector<cplx> qhat(fhat.size());
  for (int kx = lo; kx <= hi; ++kx)
    for (int ky = lo; ky <= hi; ++ky) {
      cplx s{};
      for (int lx = lo; lx <= hi; ++lx)
        for (int ly = lo; ly <= hi; ++ly) {
          const int mx = kx - lx, my = ky - ly;
          if (mx < lo || mx > hi || my < lo || my > hi) continue;
          double g = kernel_mode(lx, ly, mx, my);
          if (part == Part::Full) g -= loss[band_at(mx, my)];
          s += g * fhat[band_at(lx, ly)] * fhat[band_at(mx, my)];
        }
      qhat[band_at(kx, ky)] = s;
    }

  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < n; ++jy) {
      cplx s{};
      for (int kx = lo; kx <= hi; ++kx)
        for (int ky = lo; ky <= hi; ++ky)
          s += qhat[band_at(kx, ky)] * std::polar(1.0, xi(kx) * vg.node(jx) + xi(ky) * vg.node(jy));
      out[static_cast<std::size_t>(jx) * n + jy] = s.real();
    }
}

}  // namespace spectral

namespace detail {

inline void bgk_block(const Bgk& op, std::span<const double> block, const VelocityGrid& vg, std::size_t cell,
                      std::span<double> out) {
  const auto c = cell_moments(block, vg);
  const double rho = c[0];
  if (!(rho > 0.0)) throw degenerate_state_error("BGK: non-positive density", cell);
  const double ux = c[1] / rho, uy = c[2] / rho;
  const double T = (c[3] - 0.5 * rho * (ux * ux + uy * uy)) / (0.5 * kVelocityDim * rho);
  if (!(T > 0.0)) throw degenerate_state_error("BGK: non-positive temperature", cell);
  conservative_maxwellian_block(rho, ux, uy, T, vg, out);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = op.rate * (out[k] - block[k]);
}

inline void require_fft_size(const VelocityGrid& vg) {
  if (!is_power_of_two(vg.n()))
    throw config_error("spectral collision needs a power-of-two velocity node count (FFT size), got Nv = " +
                       std::to_string(vg.n()));
}

inline PhaseField collide(const CollisionOperator& op, const PhaseField& f, spectral::Part part) {
  validate(op);
  detail::require_finite(f.values(), "collision: non-finite distribution");
  const VelocityGrid& vg = f.velocity_grid();
  PhaseField out(vg, f.spatial_grid());
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Bgk>) {
          if (part != spectral::Part::Full) throw config_error("BGK has no separate gain term");
          parallel_for(f.nx(), [&](std::size_t i) { bgk_block(o, f.cell(int(i)), vg, i, out.cell(int(i))); });
        } else if constexpr (std::is_same_v<T, SpectralMaxwell>) {
          require_fft_size(vg);
          if (vg.n() < 4) throw config_error("spectral collision needs Nv >= 4");
          parallel_for(f.nx(), [&](std::size_t i) {
            const auto& t = spectral::tables(vg, o.kernel, o.n_angle);
            spectral::collide_fast(f.cell(int(i)), t, part, out.cell(int(i)));
          });
        } else {
          if (vg.n() % 2 != 0 || vg.n() < 4) throw config_error("direct-sum collision needs an even Nv >= 4");
          parallel_for(f.nx(), [&](std::size_t i) {
            spectral::collide_direct(f.cell(int(i)), vg, o.kernel, o.n_angle, part, out.cell(int(i)));
          });
        }
      },
      op);
  return out;
}

}  // namespace detail

/// Q(f) for every spatial cell.
inline PhaseField apply_q(const CollisionOperator& op, const PhaseField& f) {
  return detail::collide(op, f, spectral::Part::Full);
}

/// Gain term Q+(f) of the Maxwell-molecule operator.
inline PhaseField apply_gain(const CollisionOperator& op, const PhaseField& f) {
  return detail::collide(op, f, spectral::Part::GainOnly);
}

/// P(f) = Q(f) + mu f.
inline PhaseField apply_p(const CollisionOperator& op, const PhaseField& f, double mu) {
  if (!(mu > 0.0)) throw config_error("apply_p: mu must be positive");
  PhaseField p = apply_q(op, f);
  p.axpy(mu, f);
  return p;
}

/// Bound on sup |Q^-| times a safety factor: the BGK rate, or S * max_x rho for
/// cut-off Maxwell molecules. Entries below -negative_tolerance * max|f| are rejected.
inline double mu_star(const CollisionOperator& op, const PhaseField& f, double safety = 1.05,
                      double negative_tolerance = 0.0) {
  validate(op);
  if (!(safety >= 1.0)) throw config_error("mu_star: safety factor must be >= 1");
  double fmax = 0.0;
  for (double v : f.values()) fmax = std::max(fmax, std::abs(v));
  const auto vals = f.values();
  for (std::size_t n = 0; n < vals.size(); ++n)
    if (vals[n] < -negative_tolerance * fmax)
      throw numerical_error("mu_star: distribution has a negative entry at flat index " + std::to_string(n));
  return std::visit(
      [&](const auto& o) -> double {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Bgk>) {
          return safety * o.rate;
        } else {
          const MacroState m = moments(f);
          double rmax = 0.0;
          for (double r : m.rho) rmax = std::max(rmax, r);
          return safety * o.kernel * rmax;
        }
      },
      op);
}

/// Fourier-based distance max_{xi != 0} |fhat(xi) - ghat(xi)| / |xi|^2 between
/// two velocity blocks, over the retained discrete modes. Finite only when
/// mass and momentum agree, which is checked to 1e-8 relative to the mass.
inline double d2_distance(std::span<const double> f, std::span<const double> g, const VelocityGrid& vg) {
  if (f.size() != vg.size() || g.size() != vg.size()) throw config_error("d2_distance: block size mismatch");
  detail::require_fft_size(vg);
  const auto mf = detail::cell_moments(f, vg);
  const auto mg = detail::cell_moments(g, vg);
  const double scale = std::max({std::abs(mf[0]), std::abs(mg[0]), 1e-300});
  for (int c = 0; c < 3; ++c)
    if (std::abs(mf[c] - mg[c]) > 1e-8 * scale)
      throw config_error(
          "d2_distance: the two distributions must share mass and momentum, otherwise the "
          "supremum over xi of |fhat - ghat| / |xi|^2 is infinite");
  const int n = vg.n();
  const auto& t = spectral::tables(vg, 1.0, 1);
  std::vector<spectral::cplx> fh(vg.size()), gh(vg.size());
  spectral::coefficients(f, t, fh);
  spectral::coefficients(g, t, gh);
  const double area = 4.0 * vg.cutoff() * vg.cutoff();  // continuous transform = (2L)^2 * fhat_l
  double best = 0.0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      const int lx = spectral::signed_mode(ix, n), ly = spectral::signed_mode(iy, n);
      if ((lx == 0 && ly == 0) || !spectral::in_band(lx, n) || !spectral::in_band(ly, n)) continue;
      const double k2 = t.xi(lx) * t.xi(lx) + t.xi(ly) * t.xi(ly);
      best = std::max(best, area * std::abs(fh[t.at(ix, iy)] - gh[t.at(ix, iy)]) / k2);
    }
  return best;
}

inline double d2_distance(const PhaseField& f, const PhaseField& g, int cell) {
  f.require_same_shape(g);
  return d2_distance(f.cell(cell), g.cell(cell), f.velocity_grid());
}

}  // namespace expkin
