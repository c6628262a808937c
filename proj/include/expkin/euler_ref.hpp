#pragma once

// First-order kinetic flux-vector splitting for the Euler limit: interface
// fluxes are half-range velocity moments of the neighboring cell Maxwellians.

#include <cmath>
#include <numbers>
#include <vector>

#include "expkin/error.hpp"
#include "expkin/macro_euler.hpp"
#include "expkin/phase_space.hpp"

namespace expkin {

/// Euler-limit state: conservative variables on a spatial grid.
struct EulerState {
  MacroState m;
  SpatialGrid grid;
};

namespace detail {

/// Flux of (rho, rho u_x, rho u_y, E) carried by molecules with sign(v_x) = side.
inline std::array<double, 4> half_range_flux(double rho, double ux, double uy, double T, int side) {
  const double s = ux / std::sqrt(2.0 * T);
  const double A = 0.5 * std::erfc(-side * s);
  const double D = side * std::sqrt(T / (2.0 * std::numbers::pi)) * std::exp(-s * s);
  const double B = ux * A + D;                                       // int v_x g
  const double C = ux * B + T * A;                                   // int v_x^2 g
  const double V3 = (ux * ux * ux + 3.0 * ux * T) * A + (ux * ux + 2.0 * T) * D;  // int v_x^3 g
  return {rho * B, rho * C, rho * uy * B, 0.5 * rho * (V3 + B * (uy * uy + T))};
}

}  // namespace detail

/// One forward-Euler KFVS step.
inline EulerState kinetic_flux_step(const EulerState& s, double h) {
  if (!(h > 0.0)) throw config_error("kinetic_flux_step: step must be positive");
  const int n = s.grid.n();
  if (static_cast<int>(s.m.size()) != n) throw config_error("kinetic_flux_step: state does not match the grid");
  s.m.require_admissible("kinetic flux step");
  std::vector<std::array<double, 4>> plus(n + 2), minus(n + 2);
  auto cell_of = [&](int r) {  // padded index r in 0..n+1
    if (r >= 1 && r <= n) return r - 1;
    if (s.grid.boundary() == Boundary::Periodic) return r == 0 ? n - 1 : 0;
    return r == 0 ? 0 : n - 1;
  };
  for (int r = 0; r <= n + 1; ++r) {
    const int i = cell_of(r);
    const double rho = s.m.rho[i], ux = s.m.u_x(i), uy = s.m.u_y(i), T = s.m.temperature(i);
    plus[r] = detail::half_range_flux(rho, ux, uy, T, 1);
    minus[r] = detail::half_range_flux(rho, ux, uy, T, -1);
  }
  EulerState out = s;
  auto comps = out.m.components();
  const double ratio = h / s.grid.spacing();
  for (int i = 0; i < n; ++i) {
    const int r = i + 1;
    for (int c = 0; c < 4; ++c) {
      const double right = plus[r][c] + minus[r + 1][c];
      const double left = plus[r - 1][c] + minus[r][c];
      (*comps[c])[i] -= ratio * (right - left);
    }
  }
  out.m.require_admissible("kinetic flux step result");
  return out;
}

/// Step bounded by cfl * dx / max(|u_x| + sqrt(2T)).
inline double kinetic_flux_dt(const EulerState& s, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw config_error("CFL number must lie in (0, 1]");
  return cfl * s.grid.spacing() / euler_max_speed(s.m);
}

/// Integrates to t_final with the CFL step refreshed every step.
inline EulerState kinetic_flux_solve(EulerState s, double t_final, double cfl = 0.5) {
  double t = 0.0;
  while (t < t_final) {
    const double h = std::min(kinetic_flux_dt(s, cfl), t_final - t);
    s = kinetic_flux_step(s, h);
    t = t + h >= t_final * (1.0 - 1e-14) ? t_final : t + h;
  }
  return s;
}

}  // namespace expkin
