#pragma once

// Self-convergence of the density: successive grids halve dx, and each finer
// density history is restricted onto the coarser cells and compared in relative L1.
//
// The solver stores point values at cell centers, so plain pair averaging is
// only second-order accurate and would cap every observed rate at 2. On
// periodic grids the restriction is the six-point midpoint interpolation
// (3, -25, 150, 150, -25, 3) / 256, which is sixth-order accurate and, like
// pair averaging, gives every fine cell a total weight of 1/2.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "expkin/error.hpp"

namespace expkin {

/// Density snapshots rho(t_n, x_i) of one run.
struct DensityHistory {
  std::vector<double> times;
  std::vector<std::vector<double>> rho;
};

enum class Restriction { PairAverage, Periodic6 };

/// Maps fine cells (2i, 2i+1) onto coarse cell i. Both variants preserve
/// sum(rho) * dx exactly up to rounding (Periodic6 assumes periodic data).
inline std::vector<double> restrict_to_coarse(std::span<const double> fine,
                                              Restriction kind = Restriction::Periodic6) {
  if (fine.size() % 2 != 0) throw config_error("restriction needs an even number of fine cells");
  const std::size_t n = fine.size();
  std::vector<double> out(n / 2);
  if (kind == Restriction::PairAverage || n < 6) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
    return out;
  }
  static constexpr double w[6] = {3.0, -25.0, 150.0, 150.0, -25.0, 3.0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) s += w[k] * fine[(2 * i + n - 2 + k) % n];
    out[i] = s / 256.0;
  }
  return out;
}

namespace detail {

/// Fine density at time t, linear in time between snapshots.
inline std::vector<double> density_at(const DensityHistory& h, double t) {
  const auto& ts = h.times;
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  if (ts.empty() || t < ts.front() - tol || t > ts.back() + tol)
    throw config_error("convergence: time " + std::to_string(t) + " is outside the finer run's history");
  std::size_t k = 0;
  while (k + 1 < ts.size() && ts[k + 1] < t - tol) ++k;
  if (std::abs(ts[k] - t) <= tol) return h.rho[k];
  if (k + 1 < ts.size() && std::abs(ts[k + 1] - t) <= tol) return h.rho[k + 1];
  const double s = (t - ts[k]) / (ts[k + 1] - ts[k]);
  std::vector<double> out(h.rho[k].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - s) * h.rho[k][i] + s * h.rho[k + 1][i];
  return out;
}

}  // namespace detail

/// max_n ||R rho_fine(t_n) - rho_coarse(t_n)||_1 / ||rho_coarse(t_n)||_1 over the coarse times.
inline double relative_error(const DensityHistory& fine, const DensityHistory& coarse,
                             Restriction kind = Restriction::Periodic6) {
  if (coarse.times.size() != coarse.rho.size() || fine.times.size() != fine.rho.size())
    throw config_error("convergence: history has mismatched times and snapshots");
  double worst = 0.0;
  for (std::size_t n = 0; n < coarse.times.size(); ++n) {
    const auto& rc = coarse.rho[n];
    const auto f = detail::density_at(fine, coarse.times[n]);
    if (f.size() != 2 * rc.size()) throw config_error("convergence: finer grid must have twice the cells");
    const auto rf = restrict_to_coarse(f, kind);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rc.size(); ++i) {
      num += std::abs(rf[i] - rc[i]);
      den += std::abs(rc[i]);
    }
    if (den == 0.0) throw config_error("convergence: coarse density vanishes");
    worst = std::max(worst, num / den);
  }
  return worst;
}

struct RateTable {
  std::vector<double> errors;  ///< errors[k] compares levels k and k + 1
  std::vector<double> rates;   ///< rates[k] = log2(errors[k] / errors[k + 1]); +inf marks a degenerate pair
  bool degenerate(std::size_t k) const { return std::isinf(rates[k]) || std::isnan(rates[k]); }
};

/// Observed orders from histories ordered coarsest first.
inline RateTable convergence_rate(const std::vector<DensityHistory>& levels,
                                  Restriction kind = Restriction::Periodic6) {
  if (levels.size() < 3) throw config_error("convergence: need at least three grid levels");
  RateTable t;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) t.errors.push_back(relative_error(levels[k + 1], levels[k], kind));
  for (std::size_t k = 0; k + 1 < t.errors.size(); ++k) {
    const double num = t.errors[k], den = t.errors[k + 1];
    t.rates.push_back(den == 0.0 ? std::numeric_limits<double>::infinity() : std::log2(num / den));
  }
  return t;
}

}  // namespace expkin
