#pragma once

// Grids, distribution fields, moments and Maxwellians on a 1D-in-space,
// 2D-in-velocity phase space.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "expkin/error.hpp"

namespace expkin {

/// Velocity dimension. The code paths keep d explicit where it enters a formula.
inline constexpr int kVelocityDim = 2;

/// Uniform cell-centered velocity grid on [-L, L]^2 with midpoint quadrature.
class VelocityGrid {
 public:
  VelocityGrid(int n_per_dim, double cutoff) : n_(n_per_dim), cutoff_(cutoff) {
    if (n_per_dim <= 0) throw config_error("velocity grid needs a positive node count");
    if (!(cutoff > 0.0) || !std::isfinite(cutoff))
      throw config_error("velocity cutoff must be positive and finite");
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  double cutoff() const noexcept { return cutoff_; }
  double spacing() const noexcept { return 2.0 * cutoff_ / n_; }
  double node(int k) const noexcept { return -cutoff_ + (k + 0.5) * spacing(); }
  /// Quadrature weight per node.
  double weight() const noexcept { return spacing() * spacing(); }
  /// Largest |v_x| on the grid.
  double max_speed() const noexcept { return cutoff_ - 0.5 * spacing(); }

  std::vector<double> nodes() const {
    std::vector<double> v(n_);
    for (int k = 0; k < n_; ++k) v[k] = node(k);
    return v;
  }

  friend bool operator==(const VelocityGrid&, const VelocityGrid&) = default;

 private:
  int n_;
  double cutoff_;
};

enum class Boundary { Periodic, ZeroGradient };

/// Uniform cell-centered spatial grid.
class SpatialGrid {
 public:
  SpatialGrid(int n_cells, double x_min, double x_max, Boundary boundary)
      : n_(n_cells), x_min_(x_min), x_max_(x_max), boundary_(boundary) {
    if (n_cells <= 0) throw config_error("spatial grid needs a positive cell count");
    if (!(x_max > x_min)) throw config_error("spatial grid needs x_max > x_min");
  }

  int n() const noexcept { return n_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double spacing() const noexcept { return (x_max_ - x_min_) / n_; }
  double center(int i) const noexcept { return x_min_ + (i + 0.5) * spacing(); }
  Boundary boundary() const noexcept { return boundary_; }

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  int n_;
  double x_min_;
  double x_max_;
  Boundary boundary_;
};

/// Distribution f(x_i, v_k) stored cell-major: each spatial cell owns a
/// contiguous Nv x Nv block with v_y varying fastest.
class PhaseField {
 public:
  PhaseField(VelocityGrid vg, SpatialGrid sg, double fill = 0.0)
      : vg_(vg), sg_(sg), values_(static_cast<std::size_t>(sg.n()) * vg.size(), fill) {}

  const VelocityGrid& velocity_grid() const noexcept { return vg_; }
  const SpatialGrid& spatial_grid() const noexcept { return sg_; }
  int nx() const noexcept { return sg_.n(); }
  int nv() const noexcept { return vg_.n(); }
  std::size_t cell_size() const noexcept { return vg_.size(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> cell(int i) noexcept {
    return {values_.data() + static_cast<std::size_t>(i) * cell_size(), cell_size()};
  }
  std::span<const double> cell(int i) const noexcept {
    return {values_.data() + static_cast<std::size_t>(i) * cell_size(), cell_size()};
  }

  double& operator()(int i, int kx, int ky) noexcept {
    return values_[(static_cast<std::size_t>(i) * nv() + kx) * nv() + ky];
  }
  double operator()(int i, int kx, int ky) const noexcept {
    return values_[(static_cast<std::size_t>(i) * nv() + kx) * nv() + ky];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const PhaseField& other) const noexcept {
    return vg_ == other.vg_ && sg_ == other.sg_;
  }

  double max_value() const noexcept {
    double m = -INFINITY;
    for (double v : values_) m = std::max(m, v);
    return m;
  }
  double min_value() const noexcept {
    double m = INFINITY;
    for (double v : values_) m = std::min(m, v);
    return m;
  }

  /// this += a * other
  PhaseField& axpy(double a, const PhaseField& other) {
    require_same_shape(other);
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += a * other.values_[n];
    return *this;
  }

  void require_same_shape(const PhaseField& other) const {
    if (!same_shape(other)) throw config_error("phase fields have different grids");
  }

 private:
  VelocityGrid vg_;
  SpatialGrid sg_;
  std::vector<double> values_;
};

/// Conservative macroscopic variables (rho, rho*u, E) per spatial cell.
struct MacroState {
  std::vector<double> rho;
  std::vector<double> mom_x;
  std::vector<double> mom_y;
  std::vector<double> energy;

  MacroState() = default;
  explicit MacroState(std::size_t n) : rho(n, 0.0), mom_x(n, 0.0), mom_y(n, 0.0), energy(n, 0.0) {}

  std::size_t size() const noexcept { return rho.size(); }

  double u_x(std::size_t i) const noexcept { return mom_x[i] / rho[i]; }
  double u_y(std::size_t i) const noexcept { return mom_y[i] / rho[i]; }
  /// Temperature from E = rho|u|^2/2 + (d/2) rho T.
  double temperature(std::size_t i) const noexcept {
    const double kinetic = 0.5 * (mom_x[i] * mom_x[i] + mom_y[i] * mom_y[i]) / rho[i];
    return (energy[i] - kinetic) / (0.5 * kVelocityDim * rho[i]);
  }
  double internal_energy(std::size_t i) const noexcept {
    return 0.5 * kVelocityDim * temperature(i);
  }

  /// Component view in the order (rho, rho u_x, rho u_y, E).
  std::array<std::vector<double>*, 4> components() noexcept { return {&rho, &mom_x, &mom_y, &energy}; }
  std::array<const std::vector<double>*, 4> components() const noexcept {
    return {&rho, &mom_x, &mom_y, &energy};
  }

  static MacroState from_primitive(std::span<const double> rho, std::span<const double> ux,
                                   std::span<const double> uy, std::span<const double> T) {
    MacroState m(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      m.rho[i] = rho[i];
      m.mom_x[i] = rho[i] * ux[i];
      m.mom_y[i] = rho[i] * uy[i];
      m.energy[i] = 0.5 * rho[i] * (ux[i] * ux[i] + uy[i] * uy[i]) + 0.5 * kVelocityDim * rho[i] * T[i];
    }
    return m;
  }

  /// Throws degenerate_state_error for the first cell with rho <= 0 or T <= 0.
  void require_admissible(const char* context) const {
    for (std::size_t i = 0; i < size(); ++i) {
      if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
        throw degenerate_state_error(std::string(context) + ": non-positive density", i);
      const double T = temperature(i);
      if (!(T > 0.0) || !std::isfinite(T))
        throw degenerate_state_error(std::string(context) + ": non-positive temperature", i);
    }
  }
};

/// Knudsen number per spatial cell.
class EpsilonField {
 public:
  explicit EpsilonField(std::vector<double> eps) : eps_(std::move(eps)) {
    for (std::size_t i = 0; i < eps_.size(); ++i)
      if (!(eps_[i] > 0.0) || !std::isfinite(eps_[i]))
        throw config_error("Knudsen number must be positive in cell " + std::to_string(i));
  }
  static EpsilonField constant(std::size_t n, double eps) { return EpsilonField(std::vector<double>(n, eps)); }

  std::size_t size() const noexcept { return eps_.size(); }
  double operator[](std::size_t i) const noexcept { return eps_[i]; }
  std::span<const double> values() const noexcept { return eps_; }

 private:
  std::vector<double> eps_;
};

/// Stress tensor and heat flux of one cell (diagnostics only).
struct HigherMoments {
  double s_xx = 0, s_xy = 0, s_yy = 0;
  double q_x = 0, q_y = 0;
};

namespace detail {

inline void require_finite(std::span<const double> values, const char* context) {
  for (std::size_t n = 0; n < values.size(); ++n)
    if (!std::isfinite(values[n])) throw nonfinite_error(context, n);
}

/// (rho, rho u_x, rho u_y, E) of a single velocity block.
inline std::array<double, 4> cell_moments(std::span<const double> block, const VelocityGrid& vg) {
  const int nv = vg.n();
  double m0 = 0, mx = 0, my = 0, e = 0;
  for (int kx = 0; kx < nv; ++kx) {
    const double vx = vg.node(kx);
    const double* row = block.data() + static_cast<std::size_t>(kx) * nv;
    double r0 = 0, ry = 0, ryy = 0;
    for (int ky = 0; ky < nv; ++ky) {
      const double vy = vg.node(ky);
      r0 += row[ky];
      ry += vy * row[ky];
      ryy += vy * vy * row[ky];
    }
    m0 += r0;
    mx += vx * r0;
    my += ry;
    e += vx * vx * r0 + ryy;
  }
  const double w = vg.weight();
  return {m0 * w, mx * w, my * w, 0.5 * e * w};
}

/// Writes the sampled Maxwellian of (rho, u, T) into `out`. Separable in v_x, v_y.
inline void maxwellian_block(double rho, double ux, double uy, double T, const VelocityGrid& vg,
                             std::span<double> out) {
  const int nv = vg.n();
  thread_local std::vector<double> gx, gy;
  gx.resize(nv);
  gy.resize(nv);
  const double inv2T = 0.5 / T;
  for (int k = 0; k < nv; ++k) {
    const double v = vg.node(k);
    gx[k] = std::exp(-(v - ux) * (v - ux) * inv2T);
    gy[k] = std::exp(-(v - uy) * (v - uy) * inv2T);
  }
  const double amp = rho / std::pow(2.0 * std::numbers::pi * T, 0.5 * kVelocityDim);
  for (int kx = 0; kx < nv; ++kx) {
    const double ax = amp * gx[kx];
    double* row = out.data() + static_cast<std::size_t>(kx) * nv;
    for (int ky = 0; ky < nv; ++ky) row[ky] = ax * gy[ky];
  }
}

/// Sampled Maxwellian whose discrete moments reproduce (rho, u, T). The plain
/// sample loses the tails beyond the cutoff (about 2e-13 of the energy at L = 8);
/// one multiplicative/additive correction of the parameters removes that deficit
/// to rounding, so an equilibrium state is an exact discrete fixed point.
inline void conservative_maxwellian_block(double rho, double ux, double uy, double T, const VelocityGrid& vg,
                                          std::span<double> out) {
  maxwellian_block(rho, ux, uy, T, vg, out);
  const auto c = cell_moments(out, vg);
  const double r0 = c[0];
  if (!(r0 > 0.0)) return;
  const double u0x = c[1] / r0, u0y = c[2] / r0;
  const double T0 = (c[3] - 0.5 * r0 * (u0x * u0x + u0y * u0y)) / (0.5 * kVelocityDim * r0);
  if (!(T0 > 0.0) || !std::isfinite(T0)) return;
  maxwellian_block(rho * rho / r0, 2.0 * ux - u0x, 2.0 * uy - u0y, T * T / T0, vg, out);
}

}  // namespace detail

/// Mass, momentum and energy per cell by midpoint quadrature.
inline MacroState moments(const PhaseField& f) {
  detail::require_finite(f.values(), "moments: non-finite distribution");
  MacroState m(f.nx());
  for (int i = 0; i < f.nx(); ++i) {
    const auto c = detail::cell_moments(f.cell(i), f.velocity_grid());
    m.rho[i] = c[0];
    m.mom_x[i] = c[1];
    m.mom_y[i] = c[2];
    m.energy[i] = c[3];
  }
  return m;
}

/// Stress tensor S = int (v-u)(v-u) f dv and heat flux q = 1/2 int (v-u)|v-u|^2 f dv.
inline std::vector<HigherMoments> higher_moments(const PhaseField& f) {
  const MacroState m = moments(f);
  const VelocityGrid& vg = f.velocity_grid();
  std::vector<HigherMoments> out(f.nx());
  for (int i = 0; i < f.nx(); ++i) {
    if (!(m.rho[i] > 0.0)) continue;
    const double ux = m.u_x(i), uy = m.u_y(i);
    HigherMoments h;
    for (int kx = 0; kx < f.nv(); ++kx)
      for (int ky = 0; ky < f.nv(); ++ky) {
        const double cx = vg.node(kx) - ux, cy = vg.node(ky) - uy;
        const double w = f(i, kx, ky) * vg.weight();
        h.s_xx += cx * cx * w;
        h.s_xy += cx * cy * w;
        h.s_yy += cy * cy * w;
        const double c2 = 0.5 * (cx * cx + cy * cy);
        h.q_x += cx * c2 * w;
        h.q_y += cy * c2 * w;
      }
    out[i] = h;
  }
  return out;
}

/// Local Maxwellian rho/(2 pi T)^{d/2} exp(-|v-u|^2 / 2T) on the grid, with discrete moments equal to m.
inline PhaseField maxwellian(const MacroState& m, const VelocityGrid& vg, const SpatialGrid& sg) {
  if (m.size() != static_cast<std::size_t>(sg.n()))
    throw config_error("maxwellian: macro state size does not match the spatial grid");
  m.require_admissible("maxwellian");
  PhaseField out(vg, sg);
  for (int i = 0; i < sg.n(); ++i)
    detail::conservative_maxwellian_block(m.rho[i], m.u_x(i), m.u_y(i), m.temperature(i), vg, out.cell(i));
  return out;
}

/// Phase-space L1 norm, weighted by dx * dv^2.
inline double l1_norm(const PhaseField& f) {
  double s = 0.0;
  for (double v : f.values()) s += std::abs(v);
  return s * f.spatial_grid().spacing() * f.velocity_grid().weight();
}

inline double l1_distance(const PhaseField& f, const PhaseField& g) {
  f.require_same_shape(g);
  const auto a = f.values();
  const auto b = g.values();
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += std::abs(a[n] - b[n]);
  return s * f.spatial_grid().spacing() * f.velocity_grid().weight();
}

/// dx-weighted L1 norm of a per-cell quantity.
inline double l1_cells(std::span<const double> a, double dx) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s * dx;
}

inline double l1_cells_distance(std::span<const double> a, std::span<const double> b, double dx) {
  if (a.size() != b.size()) throw config_error("l1_cells_distance: size mismatch");
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += std::abs(a[n] - b[n]);
  return s * dx;
}

inline double total_mass(const MacroState& m, double dx) {
  double s = 0.0;
  for (double r : m.rho) s += r;
  return s * dx;
}

}  // namespace expkin
