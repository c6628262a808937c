#pragma once

// Command-line driver: builds a scenario, runs one solver configuration and
// writes the final macroscopic profile as CSV plus a JSON sidecar.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "expkin/collision.hpp"
#include "expkin/error.hpp"
#include "expkin/harness/scenario.hpp"
#include "expkin/integrators.hpp"
#include "expkin/tableaus.hpp"
#include "expkin/transport.hpp"

namespace expkin {

struct RunConfig {
  std::string scenario;
  std::string scheme = "exprk-f";
  std::string tableau = "midpoint2";
  std::string tableau_a, tableau_b, tableau_c;  ///< explicit arrays override `tableau`
  std::string collision = "bgk";
  std::string weno;  ///< empty: chosen from the tableau order
  std::string initial = "non-maxwellian";
  int nx = 100;
  int nv = 32;
  double cutoff = 8.0;
  double cfl = 0.5;
  double eps = 1.0;
  double eps0 = 1e-3;
  std::optional<double> t_final;
  double mu_safety = 1.05;
  double bgk_rate = 1.0;
  double kernel = 1.0;
  int n_angle = 16;
  std::string out = "expkin_out.csv";
};

namespace detail {

inline std::vector<double> parse_row(const std::string& text) {
  std::vector<double> row;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      row.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw config_error("cannot parse tableau entry '" + item + "'");
    }
  }
  return row;
}

}  // namespace detail

/// Tableau named in the config, or the explicit arrays ("a11,a12;a21,a22", "b1,b2", "c1,c2").
inline Tableau tableau_of(const RunConfig& c) {
  if (c.tableau_a.empty() && c.tableau_b.empty() && c.tableau_c.empty()) return builtin(c.tableau);
  if (c.tableau_a.empty() || c.tableau_b.empty() || c.tableau_c.empty())
    throw config_error("an explicit tableau needs all of tableau-a, tableau-b and tableau-c");
  Tableau t{"custom", {}, detail::parse_row(c.tableau_b), detail::parse_row(c.tableau_c)};
  std::stringstream ss(c.tableau_a);
  std::string row;
  while (std::getline(ss, row, ';')) t.a.push_back(detail::parse_row(row));
  t.validate();
  return t;
}

/// Upwind1 / Weno3 / Weno5 for first / second / third-order tableaus.
inline TransportScheme default_transport(const Tableau& t) {
  const int p = classical_order(t);
  if (p <= 1) return TransportScheme::Upwind1;
  if (p == 2) return TransportScheme::Weno3;
  return TransportScheme::Weno5;
}

inline CollisionOperator collision_of(const RunConfig& c) {
  CollisionOperator op;
  if (c.collision == "bgk") op = Bgk{c.bgk_rate};
  else if (c.collision == "spectral") op = SpectralMaxwell{c.kernel, c.n_angle};
  else if (c.collision == "direct") op = DirectSumMaxwell{c.kernel, c.n_angle};
  else throw config_error("unknown collision operator '" + c.collision + "' (expected bgk, spectral or direct)");
  validate(op);
  if (c.collision == "spectral" && !is_power_of_two(c.nv))
    throw config_error("spectral collision needs a power-of-two velocity node count (FFT size), got --nv " +
                       std::to_string(c.nv));
  return op;
}

struct RunOutput {
  Scenario scenario;
  SolverConfig solver;
  Trajectory trajectory;
};

inline RunOutput run(const RunConfig& c) {
  ScenarioParams p;
  p.nx = c.nx;
  p.nv = c.nv;
  p.cutoff = c.cutoff;
  p.eps = c.eps;
  p.eps0 = c.eps0;
  p.initial = initial_from_name(c.initial);
  p.t_final = c.t_final;
  if (!(c.eps > 0.0)) throw config_error("--eps must be positive");
  SolverConfig s;
  s.scheme = scheme_from_name(c.scheme);
  s.tab = tableau_of(c);
  s.op = collision_of(c);
  s.ts = c.weno.empty() ? default_transport(s.tab) : transport_from_name(c.weno);
  s.mu_safety = c.mu_safety;
  Scenario sc = build_scenario(scenario_from_name(c.scenario), p);
  s.h = cfl_dt(sc.sg, sc.vg, c.cfl);
  Trajectory tr = advance(s, sc.eps, sc.initial, sc.t_final);
  return {std::move(sc), std::move(s), std::move(tr)};
}

inline void write_profile_csv(const std::string& path, const SpatialGrid& sg, const MacroState& m) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open output file '" + path + "'");
  os << "x,rho,u_x,u_y,T\n";
  char line[160];
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", sg.center(static_cast<int>(i)), m.rho[i],
                  m.u_x(i), m.u_y(i), m.temperature(i));
    os << line;
  }
  if (!os) throw config_error("failed writing '" + path + "'");
}

inline nlohmann::json metadata(const RunConfig& c, const RunOutput& r) {
  nlohmann::json j;
  j["scenario"] = c.scenario;
  j["scheme"] = c.scheme;
  j["tableau"] = r.solver.tab.name;
  j["tableau_a"] = r.solver.tab.a;
  j["tableau_b"] = r.solver.tab.b;
  j["tableau_c"] = r.solver.tab.c;
  j["collision"] = c.collision;
  j["transport"] = name_of(r.solver.ts);
  j["initial"] = c.initial;
  j["nx"] = c.nx;
  j["nv"] = c.nv;
  j["cutoff"] = c.cutoff;
  j["cfl"] = c.cfl;
  j["eps"] = c.eps;
  j["eps0"] = c.eps0;
  j["t_final"] = r.scenario.t_final;
  j["mu_safety"] = c.mu_safety;
  j["bgk_rate"] = c.bgk_rate;
  j["kernel"] = c.kernel;
  j["n_angle"] = c.n_angle;
  j["h"] = r.solver.h;
  j["steps"] = r.trajectory.steps;
  j["min_f_over_max_f"] = r.trajectory.min_relative;
  j["temperature_clamps"] = r.trajectory.clamps.count;
  return j;
}

/// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Exponential Runge-Kutta solver for the BGK and Boltzmann equations in stiff regimes"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.add_option("--scenario", c.scenario, "smooth, sod or mixing")->required();
  app.add_option("--scheme", c.scheme, "exprk-f or exprk-v")->capture_default_str();
  app.add_option("--tableau", c.tableau, "euler1, midpoint2, heun2, heun3, ssprk3")->capture_default_str();
  app.add_option("--tableau-a", c.tableau_a, "explicit a matrix, rows split by ';'");
  app.add_option("--tableau-b", c.tableau_b, "explicit b weights");
  app.add_option("--tableau-c", c.tableau_c, "explicit c abscissae");
  app.add_option("--collision", c.collision, "bgk, spectral or direct")->capture_default_str();
  app.add_option("--weno", c.weno, "upwind1, weno3 or weno5 (default from tableau order)");
  app.add_option("--initial", c.initial, "smooth scenario data: non-maxwellian or maxwellian")->capture_default_str();
  app.add_option("--nx", c.nx, "spatial cells")->capture_default_str();
  app.add_option("--nv", c.nv, "velocity nodes per dimension")->capture_default_str();
  app.add_option("--cutoff", c.cutoff, "velocity cutoff L")->capture_default_str();
  app.add_option("--cfl", c.cfl, "CFL number")->capture_default_str();
  app.add_option("--eps", c.eps, "Knudsen number (smooth, sod)")->capture_default_str();
  app.add_option("--eps0", c.eps0, "background Knudsen number (mixing)")->capture_default_str();
  app.add_option("--tfinal", c.t_final, "final time (default per scenario)");
  app.add_option("--mu-safety", c.mu_safety, "factor applied to mu*")->capture_default_str();
  app.add_option("--bgk-rate", c.bgk_rate, "BGK relaxation rate")->capture_default_str();
  app.add_option("--kernel", c.kernel, "Maxwell kernel constant S")->capture_default_str();
  app.add_option("--angles", c.n_angle, "angular nodes of the Maxwell kernel")->capture_default_str();
  app.add_option("--out", c.out, "CSV output path; metadata goes to <out>.json")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    const RunOutput r = run(c);
    write_profile_csv(c.out, r.scenario.sg, r.trajectory.macro.back());
    std::ofstream meta(c.out + ".json");
    if (!meta) throw config_error("cannot open '" + c.out + ".json'");
    meta << metadata(c, r).dump(2) << "\n";
    out << "wrote " << c.out << " (" << r.trajectory.steps << " steps, h = " << r.solver.h << ")\n";
    return 0;
  } catch (const config_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const numerical_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace expkin
