#pragma once

// Benchmark problems: a smooth periodic problem for convergence studies, the
// Sod shock tube, and a problem whose Knudsen number varies across the domain.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "expkin/error.hpp"
#include "expkin/phase_space.hpp"

namespace expkin {

enum class ScenarioName { SmoothConvergence, Sod, MixingRegime };

/// Smooth problem: two-Gaussian data far from equilibrium, or its local Maxwellian.
enum class InitialKind { NonMaxwellian, Maxwellian };

inline std::string name_of(ScenarioName s) {
  switch (s) {
    case ScenarioName::SmoothConvergence: return "smooth";
    case ScenarioName::Sod: return "sod";
    default: return "mixing";
  }
}

inline ScenarioName scenario_from_name(const std::string& name) {
  if (name == "smooth") return ScenarioName::SmoothConvergence;
  if (name == "sod") return ScenarioName::Sod;
  if (name == "mixing") return ScenarioName::MixingRegime;
  throw config_error("unknown scenario '" + name + "' (expected smooth, sod or mixing)");
}

inline std::string name_of(InitialKind k) { return k == InitialKind::Maxwellian ? "maxwellian" : "non-maxwellian"; }

inline InitialKind initial_from_name(const std::string& name) {
  if (name == "maxwellian") return InitialKind::Maxwellian;
  if (name == "non-maxwellian") return InitialKind::NonMaxwellian;
  throw config_error("unknown initial data '" + name + "' (expected maxwellian or non-maxwellian)");
}

struct ScenarioParams {
  int nx = 100;
  int nv = 32;
  double cutoff = 8.0;
  double eps = 1.0;   ///< constant Knudsen number (smooth, sod)
  double eps0 = 1e-3;  ///< background Knudsen number (mixing)
  InitialKind initial = InitialKind::NonMaxwellian;
  std::optional<double> t_final;
};

struct Scenario {
  ScenarioName name;
  VelocityGrid vg;
  SpatialGrid sg;
  EpsilonField eps;
  PhaseField initial;
  double t_final;
};

inline double default_final_time(ScenarioName s) {
  switch (s) {
    case ScenarioName::SmoothConvergence: return 0.1;
    case ScenarioName::Sod: return 0.2;
    default: return 0.25;
  }
}

/// eps0 + (tanh(6 - 20x) + tanh(6 + 20x)) / 2 for x < 0.2, eps0 beyond.
inline double mixing_epsilon(double x, double eps0) {
  if (x > 0.2) return eps0;
  return eps0 + 0.5 * (std::tanh(6.0 - 20.0 * x) + std::tanh(6.0 + 20.0 * x));
}

namespace detail {

/// Fills a cell with a * (exp(-|v-u|^2 / s) + exp(-|v+u|^2 / s)) for u = (ux, uy).
inline void two_gaussians(double a, double ux, double uy, double s, const VelocityGrid& vg, std::span<double> out) {
  const int nv = vg.n();
  for (int kx = 0; kx < nv; ++kx)
    for (int ky = 0; ky < nv; ++ky) {
      const double vx = vg.node(kx), vy = vg.node(ky);
      const double p = (vx - ux) * (vx - ux) + (vy - uy) * (vy - uy);
      const double m = (vx + ux) * (vx + ux) + (vy + uy) * (vy + uy);
      out[static_cast<std::size_t>(kx) * nv + ky] = a * (std::exp(-p / s) + std::exp(-m / s));
    }
}

}  // namespace detail

/// Closed-form macro state of the smooth problem's two-Gaussian data at x:
/// rho = rho0 pi T0, u = 0, T = T0 / 2 + 0.75^2.
inline std::array<double, 4> smooth_primitive(double x) {
  const double rho0 = 0.5 * (2.0 + std::sin(2.0 * std::numbers::pi * x));
  const double T0 = (5.0 + 2.0 * std::cos(2.0 * std::numbers::pi * x)) / 20.0;
  return {rho0 * std::numbers::pi * T0, 0.0, 0.0, 0.5 * T0 + 0.75 * 0.75};
}

inline Scenario build_scenario(ScenarioName name, const ScenarioParams& p) {
  if (p.t_final && !(*p.t_final >= 0.0)) throw config_error("final time must be nonnegative");
  const VelocityGrid vg(p.nv, p.cutoff);
  const double tf = p.t_final.value_or(default_final_time(name));
  switch (name) {
    case ScenarioName::SmoothConvergence: {
      const SpatialGrid sg(p.nx, 0.0, 1.0, Boundary::Periodic);
      PhaseField f(vg, sg);
      for (int i = 0; i < p.nx; ++i) {
        const double x = sg.center(i);
        if (p.initial == InitialKind::Maxwellian) {
          const auto q = smooth_primitive(x);
          detail::conservative_maxwellian_block(q[0], q[1], q[2], q[3], vg, f.cell(i));
        } else {
          const double rho0 = 0.5 * (2.0 + std::sin(2.0 * std::numbers::pi * x));
          const double T0 = (5.0 + 2.0 * std::cos(2.0 * std::numbers::pi * x)) / 20.0;
          detail::two_gaussians(0.5 * rho0, 0.75, -0.75, T0, vg, f.cell(i));
        }
      }
      return {name, vg, sg, EpsilonField::constant(p.nx, p.eps), std::move(f), tf};
    }
    case ScenarioName::Sod: {
      const SpatialGrid sg(p.nx, -0.5, 0.5, Boundary::ZeroGradient);
      PhaseField f(vg, sg);
      for (int i = 0; i < p.nx; ++i) {
        const bool left = sg.center(i) < 0.0;
        detail::conservative_maxwellian_block(left ? 1.0 : 0.125, 0.0, 0.0, left ? 1.0 : 0.25, vg, f.cell(i));
      }
      return {name, vg, sg, EpsilonField::constant(p.nx, p.eps), std::move(f), tf};
    }
    default: {
      if (!(p.eps0 > 0.0)) throw config_error("eps0 must be positive");
      const SpatialGrid sg(p.nx, -0.5, 0.5, Boundary::Periodic);
      PhaseField f(vg, sg);
      std::vector<double> eps(p.nx);
      for (int i = 0; i < p.nx; ++i) {
        const double x = sg.center(i);
        const double phase = 2.0 * std::numbers::pi * x + std::numbers::pi;
        const double rho0 = (2.0 + std::sin(phase)) / 3.0;
        const double u0 = 0.2 * std::cos(phase);
        const double T0 = (3.0 + std::cos(phase)) / 4.0;
        detail::two_gaussians(rho0 / (4.0 * std::numbers::pi * T0), u0, 0.0, 2.0 * T0, vg, f.cell(i));
        eps[i] = mixing_epsilon(x, p.eps0);
      }
      return {name, vg, sg, EpsilonField(std::move(eps)), std::move(f), tf};
    }
  }
}

}  // namespace expkin
