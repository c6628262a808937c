#pragma once

// Compressible Euler system for a gas with two velocity degrees of freedom
// (gamma = 2), discretized with WENO and local Lax-Friedrichs flux splitting,
// and advanced with an explicit Runge-Kutta tableau. Provides the fixed
// equilibrium of the ExpRK-F scheme.

#include <array>
#include <cmath>
#include <vector>

#include "expkin/error.hpp"
#include "expkin/phase_space.hpp"
#include "expkin/tableaus.hpp"
#include "expkin/transport.hpp"

namespace expkin {

namespace detail {

/// Physical flux (rho u_x, rho u_x^2 + p, rho u_x u_y, (E + p) u_x) with p = rho T.
inline std::array<double, 4> euler_flux(double rho, double mx, double my, double e) noexcept {
  const double ux = mx / rho;
  const double kinetic = 0.5 * (mx * mx + my * my) / rho;
  const double p = (e - kinetic) / (0.5 * kVelocityDim);  // rho T
  return {mx, mx * ux + p, my * ux, (e + p) * ux};
}

/// |u_x| + sqrt(2T), the largest characteristic speed for gamma = 2.
inline double euler_speed(double rho, double mx, double my, double e) noexcept {
  const double kinetic = 0.5 * (mx * mx + my * my) / rho;
  const double T = (e - kinetic) / (0.5 * kVelocityDim * rho);
  return std::abs(mx / rho) + std::sqrt(std::max(0.0, 2.0 * T));
}

}  // namespace detail

/// d/dx of the Euler flux per cell, as a MacroState of component derivatives.
inline MacroState euler_divergence(TransportScheme s, const MacroState& m, const SpatialGrid& sg) {
  const int n = sg.n();
  const int g = ghost_cells(s);
  if (static_cast<int>(m.size()) != n) throw config_error("euler_divergence: state does not match the grid");
  if (n < g) throw config_error("euler_divergence: Nx is smaller than the stencil");
  m.require_admissible("Euler RK");
  // Padded rows of (U, F(U)) with 8 values each.
  std::vector<double> pad((n + 2 * g) * 8);
  std::vector<double> speed(n + 2 * g);
  for (int i = 0; i < n; ++i) {
    double* row = pad.data() + (g + i) * 8;
    row[0] = m.rho[i];
    row[1] = m.mom_x[i];
    row[2] = m.mom_y[i];
    row[3] = m.energy[i];
    const auto f = detail::euler_flux(row[0], row[1], row[2], row[3]);
    std::copy(f.begin(), f.end(), row + 4);
  }
  detail::fill_ghosts(pad, n, g, 8, sg.boundary());
  for (int r = 0; r < n + 2 * g; ++r) {
    const double* row = pad.data() + r * 8;
    speed[r] = detail::euler_speed(row[0], row[1], row[2], row[3]);
  }

  std::vector<std::array<double, 4>> flux(n + 1);
  std::array<double, 6> plus{}, minus{};
  for (int face = 0; face <= n; ++face) {
    // Face between padded rows L = g + face - 1 and L + 1; stencil rows L - g + 1 .. L + g.
    const int left = g + face - 1;
    double alpha = 0.0;
    for (int r = left - g + 1; r <= left + g; ++r) alpha = std::max(alpha, speed[r]);
    for (int c = 0; c < 4; ++c) {
      for (int k = 0; k < 2 * g; ++k) {
        const double* row = pad.data() + (left - g + 1 + k) * 8;
        plus[k] = 0.5 * (row[4 + c] + alpha * row[c]);
        minus[k] = 0.5 * (row[4 + c] - alpha * row[c]);
      }
      // plus: upwind cell at index g - 1; minus: upwind cell at index g, mirrored.
      flux[face][c] = detail::reconstruct(s, &plus[g - 1], 1) + detail::reconstruct(s, &minus[g], -1);
    }
  }
  MacroState out(n);
  auto comps = out.components();
  const double dx = sg.spacing();
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 4; ++c) (*comps[c])[i] = (flux[i + 1][c] - flux[i][c]) / dx;
  return out;
}

/// Largest characteristic speed over the grid.
inline double euler_max_speed(const MacroState& m) {
  double a = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    a = std::max(a, detail::euler_speed(m.rho[i], m.mom_x[i], m.mom_y[i], m.energy[i]));
  return a;
}

struct MacroRkResult {
  MacroState next;
  std::vector<MacroState> stages;
};

/// One explicit RK step of the Euler system with the given tableau.
inline MacroRkResult macro_euler_rk(const Tableau& tab, const MacroState& m_n, const SpatialGrid& sg, double h,
                                    TransportScheme s) {
  if (!(h > 0.0)) throw config_error("macro_euler_rk: step must be positive");
  const int nu = tab.stages();
  MacroRkResult res;
  std::vector<MacroState> rhs;
  auto combine = [&](const std::vector<double>& coeff, int count) {
    MacroState u = m_n;
    auto uc = u.components();
    for (int j = 0; j < count; ++j) {
      if (coeff[j] == 0.0) continue;
      auto rc = rhs[j].components();
      for (int c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < u.size(); ++i) (*uc[c])[i] -= h * coeff[j] * (*rc[c])[i];
    }
    return u;
  };
  for (int i = 0; i < nu; ++i) {
    MacroState stage = combine(tab.a[i], i);
    stage.require_admissible(("Euler RK stage " + std::to_string(i + 1)).c_str());
    rhs.push_back(euler_divergence(s, stage, sg));
    res.stages.push_back(std::move(stage));
  }
  res.next = combine(tab.b, nu);
  res.next.require_admissible("Euler RK final step");
  return res;
}

}  // namespace expkin
