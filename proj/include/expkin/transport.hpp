#pragma once

// Finite-difference discretization of v_x df/dx and the CFL step rule.
// Each velocity node advects at a constant speed, so the numerical flux is a
// plain upwind reconstruction (no flux splitting).

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "expkin/error.hpp"
#include "expkin/parallel.hpp"
#include "expkin/phase_space.hpp"

namespace expkin {

enum class TransportScheme { Upwind1, Weno3, Weno5 };

inline constexpr double kWenoEpsilon = 1e-6;

/// Ghost cells needed on each side.
inline int ghost_cells(TransportScheme s) noexcept {
  switch (s) {
    case TransportScheme::Upwind1: return 1;
    case TransportScheme::Weno3: return 2;
    default: return 3;
  }
}

inline std::string name_of(TransportScheme s) {
  switch (s) {
    case TransportScheme::Upwind1: return "upwind1";
    case TransportScheme::Weno3: return "weno3";
    default: return "weno5";
  }
}

inline TransportScheme transport_from_name(const std::string& name) {
  if (name == "upwind1") return TransportScheme::Upwind1;
  if (name == "weno3") return TransportScheme::Weno3;
  if (name == "weno5") return TransportScheme::Weno5;
  throw config_error("unknown transport scheme '" + name + "' (expected upwind1, weno3 or weno5)");
}

namespace detail {

// Reconstructions of the interface value downstream of the center cell. The
// stencil entry a(m) sits m cells upstream (m < 0) or downstream (m > 0).
inline double weno3(double am1, double a0, double a1) noexcept {
  const double q0 = 0.5 * (-am1 + 3.0 * a0);
  const double q1 = 0.5 * (a0 + a1);
  const double b0 = (a0 - am1) * (a0 - am1);
  const double b1 = (a1 - a0) * (a1 - a0);
  const double w0 = (1.0 / 3.0) / ((kWenoEpsilon + b0) * (kWenoEpsilon + b0));
  const double w1 = (2.0 / 3.0) / ((kWenoEpsilon + b1) * (kWenoEpsilon + b1));
  return (w0 * q0 + w1 * q1) / (w0 + w1);
}

inline double weno5(double am2, double am1, double a0, double a1, double a2) noexcept {
  const double q0 = (2.0 * am2 - 7.0 * am1 + 11.0 * a0) / 6.0;
  const double q1 = (-am1 + 5.0 * a0 + 2.0 * a1) / 6.0;
  const double q2 = (2.0 * a0 + 5.0 * a1 - a2) / 6.0;
  const double s0 = am2 - 2.0 * am1 + a0, t0 = am2 - 4.0 * am1 + 3.0 * a0;
  const double s1 = am1 - 2.0 * a0 + a1, t1 = am1 - a1;
  const double s2 = a0 - 2.0 * a1 + a2, t2 = 3.0 * a0 - 4.0 * a1 + a2;
  const double b0 = 13.0 / 12.0 * s0 * s0 + 0.25 * t0 * t0;
  const double b1 = 13.0 / 12.0 * s1 * s1 + 0.25 * t1 * t1;
  const double b2 = 13.0 / 12.0 * s2 * s2 + 0.25 * t2 * t2;
  const double w0 = 0.1 / ((kWenoEpsilon + b0) * (kWenoEpsilon + b0));
  const double w1 = 0.6 / ((kWenoEpsilon + b1) * (kWenoEpsilon + b1));
  const double w2 = 0.3 / ((kWenoEpsilon + b2) * (kWenoEpsilon + b2));
  return (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2);
}

/// Interface value reconstructed around `center`, reading neighbors at
/// center[dir * m * stride]. dir = +1 gives the value at the right face from
/// the left-biased stencil; dir = -1 gives the left face from the mirrored one.
inline double reconstruct(TransportScheme s, const double* center, std::ptrdiff_t step) noexcept {
  switch (s) {
    case TransportScheme::Upwind1: return center[0];
    case TransportScheme::Weno3: return weno3(center[-step], center[0], center[step]);
    default: return weno5(center[-2 * step], center[-step], center[0], center[step], center[2 * step]);
  }
}

/// Fills g ghost rows on each side of a padded array of (n + 2g) rows of `width` values.
inline void fill_ghosts(std::span<double> padded, int n, int g, std::size_t width, Boundary b) {
  auto row = [&](int r) { return padded.data() + static_cast<std::size_t>(r) * width; };
  for (int k = 0; k < g; ++k) {
    const int left_src = b == Boundary::Periodic ? n + k : g;          // ghost row k
    const int right_src = b == Boundary::Periodic ? g + k : g + n - 1;  // ghost row g + n + k
    std::copy(row(left_src), row(left_src) + width, row(k));
    std::copy(row(right_src), row(right_src) + width, row(g + n + k));
  }
}

}  // namespace detail

/// Discrete v_x df/dx on a single line of cell values advected at `speed`.
inline std::vector<double> divergence_line(TransportScheme s, std::span<const double> q, double speed, double dx,
                                           Boundary boundary) {
  const int n = static_cast<int>(q.size());
  const int g = ghost_cells(s);
  if (n < g) throw config_error("transport: Nx = " + std::to_string(n) + " is smaller than the stencil");
  std::vector<double> padded(n + 2 * g);
  std::copy(q.begin(), q.end(), padded.begin() + g);
  detail::fill_ghosts(padded, n, g, 1, boundary);
  std::vector<double> flux(n + 1);
  for (int face = 0; face <= n; ++face) {
    // face sits between padded cells g + face - 1 and g + face
    const double* up = speed >= 0 ? &padded[g + face - 1] : &padded[g + face];
    flux[face] = speed * detail::reconstruct(s, up, speed >= 0 ? 1 : -1);
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = (flux[i + 1] - flux[i]) / dx;
  return out;
}

/// v_x df/dx for every (cell, velocity node).
inline PhaseField divergence(TransportScheme s, const PhaseField& f) {
  detail::require_finite(f.values(), "divergence: non-finite distribution");
  const int n = f.nx();
  const int g = ghost_cells(s);
  if (n < g) throw config_error("transport: Nx = " + std::to_string(n) + " is smaller than the stencil");
  const VelocityGrid& vg = f.velocity_grid();
  const SpatialGrid& sg = f.spatial_grid();
  const int nv = vg.n();
  const double dx = sg.spacing();
  PhaseField out(vg, sg);
  parallel_for(static_cast<std::size_t>(nv), [&](std::size_t kx) {
    const double speed = vg.node(static_cast<int>(kx));
    const std::size_t w = static_cast<std::size_t>(nv);
    thread_local std::vector<double> padded, flux;
    padded.resize((n + 2 * g) * w);
    flux.resize((n + 1) * w);
    for (int i = 0; i < n; ++i) {
      const double* src = f.cell(i).data() + kx * w;
      std::copy(src, src + w, padded.data() + (g + i) * w);
    }
    detail::fill_ghosts(padded, n, g, w, sg.boundary());
    const std::ptrdiff_t step = speed >= 0 ? static_cast<std::ptrdiff_t>(w) : -static_cast<std::ptrdiff_t>(w);
    for (int face = 0; face <= n; ++face) {
      const double* up = padded.data() + (speed >= 0 ? g + face - 1 : g + face) * w;
      double* fl = flux.data() + face * w;
      for (std::size_t ky = 0; ky < w; ++ky) fl[ky] = speed * detail::reconstruct(s, up + ky, step);
    }
    for (int i = 0; i < n; ++i) {
      double* dst = out.cell(i).data() + kx * w;
      const double* lo = flux.data() + i * w;
      const double* hi = lo + w;
      for (std::size_t ky = 0; ky < w; ++ky) dst[ky] = (hi[ky] - lo[ky]) / dx;
    }
  });
  return out;
}

/// h = cfl * dx / max |v_x| = cfl * dx / (L - dv/2).
inline double cfl_dt(const SpatialGrid& sg, const VelocityGrid& vg, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw config_error("CFL number must lie in (0, 1]");
  return cfl * sg.spacing() / vg.max_speed();
}

}  // namespace expkin
