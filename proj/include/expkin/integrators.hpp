#pragma once

// Exponential Runge-Kutta steppers for eps df/dt + eps v.grad f = Q(f), written
// for (f - M) e^{mu t / eps} with P = Q + mu f:
//   ExpRK-F uses a fixed equilibrium Mtilde obtained by advancing the Euler
//   system one step with the same tableau;
//   ExpRK-V uses the local Maxwellian, whose moments follow the conservation
//   laws and whose time derivative enters as a source.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "expkin/collision.hpp"
#include "expkin/error.hpp"
#include "expkin/macro_euler.hpp"
#include "expkin/phase_space.hpp"
#include "expkin/tableaus.hpp"
#include "expkin/transport.hpp"

namespace expkin {

/// Largest exponent for which exp(z) is still evaluated when an abscissa
/// ordering violation makes an exponent positive.
inline constexpr double kMaxPositiveExponent = 700.0;

/// Clamping threshold for negative temperatures in the ExpRK-V moment subsystem.
inline constexpr double kTemperatureTolerance = 1e-8;

struct StepContext {
  CollisionOperator op;
  TransportScheme ts = TransportScheme::Weno5;
  Tableau tab;
  double mu = 1.0;
  EpsilonField eps = EpsilonField::constant(1, 1.0);
  double h = 0.0;

  double lambda(std::size_t cell) const noexcept { return mu * h / eps[cell]; }

  void validate(const PhaseField& f) const {
    tab.validate();
    expkin::validate(op);
    if (!(h > 0.0) || !std::isfinite(h)) throw config_error("time step must be positive and finite");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw config_error("mu must be positive and finite");
    if (eps.size() != static_cast<std::size_t>(f.nx())) throw config_error("epsilon field does not match the grid");
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (!std::isfinite(lambda(i))) throw config_error("lambda = mu h / eps is not finite in cell " + std::to_string(i));
  }
};

/// Per-stage values of one step. Filled only when a record is requested.
struct StageRecord {
  std::vector<PhaseField> f_stage;
  std::vector<MacroState> m_stage;  ///< ExpRK-V moment subsystem; ExpRK-F Euler stages
  std::vector<PhaseField> p_stage;
  std::vector<PhaseField> div_stage;
  std::vector<PhaseField> dtm_stage;  ///< ExpRK-V only
  std::optional<MacroState> m_final;  ///< end-of-step subsystem or Euler state
};

/// Temperature clamps applied in the ExpRK-V moment subsystem.
struct ClampLog {
  std::size_t count = 0;
  double largest = 0.0;  ///< largest |T| clamped
};

namespace detail {

inline void require_finite_stage(const PhaseField& f, const char* scheme, int stage) {
  const auto v = f.values();
  for (std::size_t n = 0; n < v.size(); ++n)
    if (!std::isfinite(v[n]))
      throw nonfinite_error(std::string(scheme) + ": non-finite value in stage " + std::to_string(stage) +
                                ", cell " + std::to_string(n / f.cell_size()),
                            n);
}

/// exp((c_j - c_i) lambda) with the overflow guard for unordered abscissae.
inline double stage_decay(double cj, double ci, double lambda, const std::string& tableau) {
  const double z = (cj - ci) * lambda;
  if (z > kMaxPositiveExponent)
    throw numerical_error("tableau '" + tableau + "' has c_j > c_i and lambda = " + std::to_string(lambda) +
                          " makes exp(lambda (c_j - c_i)) overflow; use a tableau with ordered abscissae "
                          "(c_j <= c_i for j < i) or a smaller step");
  return std::exp(z);
}

}  // namespace detail

/// Euler step with the same tableau and Mtilde = maxwellian(m^{n+1}).
struct MTilde {
  PhaseField field;
  MacroRkResult macro;
};

inline MTilde build_m_tilde(const Tableau& tab, TransportScheme ts, const MacroState& m_n, const VelocityGrid& vg,
                            const SpatialGrid& sg, double h) {
  MacroRkResult macro = macro_euler_rk(tab, m_n, sg, h, ts);
  PhaseField field = maxwellian(macro.next, vg, sg);
  return {std::move(field), std::move(macro)};
}

/// One ExpRK-F step with a given fixed equilibrium.
inline PhaseField exprk_f_step(const StepContext& ctx, const PhaseField& f_n, const PhaseField& m_tilde,
                               StageRecord* record = nullptr) {
  ctx.validate(f_n);
  f_n.require_same_shape(m_tilde);
  detail::require_finite(f_n.values(), "ExpRK-F: non-finite initial state");
  const Tableau& t = ctx.tab;
  const int nu = t.stages();
  const std::size_t cs = f_n.cell_size();
  std::vector<PhaseField> p, div;
  p.reserve(nu);
  div.reserve(nu);

  // Row i of the extended tableau (i = nu is the final step).
  auto assemble = [&](int i) {
    const std::vector<double>& row = i < nu ? t.a[i] : t.b;
    const double ci = i < nu ? t.c[i] : 1.0;
    const int width = i < nu ? i : nu;
    PhaseField out(f_n.velocity_grid(), f_n.spatial_grid());
    std::vector<double> w(width), dcoef(width);
    for (int cell = 0; cell < f_n.nx(); ++cell) {
      const double lam = ctx.lambda(cell);
      double m_coef = -std::expm1(-ci * lam);
      for (int j = 0; j < width; ++j) {
        const double decay = row[j] == 0.0 ? 0.0 : detail::stage_decay(t.c[j], ci, lam, t.name);
        w[j] = row[j] * lam * decay / ctx.mu;  // multiplies P^(j)
        dcoef[j] = row[j] * ctx.h * decay;     // multiplies v.grad f^(j)
        m_coef -= row[j] * lam * decay;
      }
      const double fn_coef = std::exp(-ci * lam);
      auto o = out.cell(cell);
      const auto fn = f_n.cell(cell);
      const auto mt = m_tilde.cell(cell);
      for (std::size_t k = 0; k < cs; ++k) o[k] = m_coef * mt[k] + fn_coef * fn[k];
      for (int j = 0; j < width; ++j) {
        if (row[j] == 0.0) continue;
        const auto pj = p[j].cell(cell);
        const auto dj = div[j].cell(cell);
        for (std::size_t k = 0; k < cs; ++k) o[k] += w[j] * pj[k] - dcoef[j] * dj[k];
      }
    }
    detail::require_finite_stage(out, "ExpRK-F", i + 1);
    return out;
  };

  for (int i = 0; i < nu; ++i) {
    PhaseField fi = i == 0 && t.c[0] == 0.0 ? f_n : assemble(i);
    p.push_back(apply_p(ctx.op, fi, ctx.mu));
    div.push_back(divergence(ctx.ts, fi));
    if (record) record->f_stage.push_back(std::move(fi));
  }
  PhaseField next = assemble(nu);
  if (record) {
    record->p_stage = std::move(p);
    record->div_stage = std::move(div);
  }
  return next;
}

/// Moments of v.grad f per cell: (int div, int v_x div, int v_y div, int |v|^2/2 div).
inline MacroState transport_moments(const PhaseField& div) { return moments(div); }

/// dM/dt from the transport moments `dm` (moments of v.grad f) at macro state m.
inline PhaseField dt_maxwellian_from_divergence(const MacroState& dm, const MacroState& m, const VelocityGrid& vg,
                                                const SpatialGrid& sg) {
  if (dm.size() != m.size() || m.size() != static_cast<std::size_t>(sg.n()))
    throw config_error("dt_maxwellian: size mismatch");
  m.require_admissible("dt_maxwellian");
  constexpr double d = kVelocityDim;
  PhaseField out(vg, sg);
  const int nv = vg.n();
  for (int i = 0; i < sg.n(); ++i) {
    const double rho = m.rho[i], ux = m.u_x(i), uy = m.u_y(i), T = m.temperature(i), E = m.energy[i];
    const double drho = -dm.rho[i];
    const double dux = (ux * dm.rho[i] - dm.mom_x[i]) / rho;
    const double duy = (uy * dm.rho[i] - dm.mom_y[i]) / rho;
    // int |v|^2 v.grad f = 2 * (energy moment of div)
    const double dT = (-2.0 * E / rho * drho - 2.0 * rho * (ux * dux + uy * duy) - 2.0 * dm.energy[i]) / (d * rho);
    auto o = out.cell(i);
    detail::maxwellian_block(rho, ux, uy, T, vg, o);
    for (int kx = 0; kx < nv; ++kx) {
      const double cx = vg.node(kx) - ux;
      for (int ky = 0; ky < nv; ++ky) {
        const double cy = vg.node(ky) - uy;
        const double factor = drho / rho + (cx * dux + cy * duy) / T +
                              ((cx * cx + cy * cy) / (2.0 * T * T) - d / (2.0 * T)) * dT;
        o[static_cast<std::size_t>(kx) * nv + ky] *= factor;
      }
    }
  }
  return out;
}

/// dM/dt for the local Maxwellian of macro state m, with f evolving by transport alone.
inline PhaseField dt_maxwellian(TransportScheme ts, const PhaseField& f, const MacroState& m) {
  return dt_maxwellian_from_divergence(moments(divergence(ts, f)), m, f.velocity_grid(), f.spatial_grid());
}

namespace detail {

/// U = U^n - h sum_j coeff_j I^(j), with negative temperatures above the
/// tolerance clamped to the tolerance.
inline MacroState advance_subsystem(const MacroState& un, const std::vector<MacroState>& dm,
                                    const std::vector<double>& coeff, int count, double h, ClampLog* log,
                                    const std::string& where) {
  MacroState u = un;
  auto uc = u.components();
  for (int j = 0; j < count; ++j) {
    if (coeff[j] == 0.0) continue;
    auto dc = dm[j].components();
    for (int c = 0; c < 4; ++c)
      for (std::size_t i = 0; i < u.size(); ++i) (*uc[c])[i] -= h * coeff[j] * (*dc[c])[i];
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u.rho[i] > 0.0) || !std::isfinite(u.rho[i]))
      throw degenerate_state_error("ExpRK-V " + where + ": non-positive density", i);
    const double T = u.temperature(i);
    if (!std::isfinite(T)) throw degenerate_state_error("ExpRK-V " + where + ": non-finite temperature", i);
    if (T > 0.0) continue;
    if (T < -kTemperatureTolerance)
      throw degenerate_state_error("ExpRK-V " + where + ": negative temperature " + std::to_string(T), i);
    const double kinetic = 0.5 * (u.mom_x[i] * u.mom_x[i] + u.mom_y[i] * u.mom_y[i]) / u.rho[i];
    u.energy[i] = kinetic + 0.5 * kVelocityDim * u.rho[i] * kTemperatureTolerance;
    if (log) {
      ++log->count;
      log->largest = std::max(log->largest, std::abs(T));
    }
  }
  return u;
}

}  // namespace detail

/// One ExpRK-V step.
inline PhaseField exprk_v_step(const StepContext& ctx, const PhaseField& f_n, StageRecord* record = nullptr,
                               ClampLog* clamps = nullptr) {
  ctx.validate(f_n);
  detail::require_finite(f_n.values(), "ExpRK-V: non-finite initial state");
  const Tableau& t = ctx.tab;
  const int nu = t.stages();
  const VelocityGrid& vg = f_n.velocity_grid();
  const SpatialGrid& sg = f_n.spatial_grid();
  const std::size_t cs = f_n.cell_size();
  const MacroState u_n = moments(f_n);
  const PhaseField m_n = maxwellian(u_n, vg, sg);

  std::vector<PhaseField> p, div, dtm, mw;
  std::vector<MacroState> dm, u;
  p.reserve(nu);
  div.reserve(nu);
  dtm.reserve(nu);
  mw.reserve(nu);

  auto assemble = [&](int i, const PhaseField& mi) {
    const std::vector<double>& row = i < nu ? t.a[i] : t.b;
    const double ci = i < nu ? t.c[i] : 1.0;
    const int width = i < nu ? i : nu;
    PhaseField out(vg, sg);
    std::vector<double> w(width), dcoef(width);
    for (int cell = 0; cell < f_n.nx(); ++cell) {
      const double lam = ctx.lambda(cell);
      for (int j = 0; j < width; ++j) {
        const double decay = row[j] == 0.0 ? 0.0 : detail::stage_decay(t.c[j], ci, lam, t.name);
        w[j] = row[j] * lam * decay;
        dcoef[j] = row[j] * ctx.h * decay;
      }
      const double fn_coef = std::exp(-ci * lam);
      auto o = out.cell(cell);
      const auto fn = f_n.cell(cell);
      const auto mn = m_n.cell(cell);
      const auto m = mi.cell(cell);
      for (std::size_t k = 0; k < cs; ++k) o[k] = m[k] + fn_coef * (fn[k] - mn[k]);
      for (int j = 0; j < width; ++j) {
        if (row[j] == 0.0) continue;
        const auto pj = p[j].cell(cell);
        const auto mj = mw[j].cell(cell);
        const auto dj = div[j].cell(cell);
        const auto tj = dtm[j].cell(cell);
        for (std::size_t k = 0; k < cs; ++k)
          o[k] += w[j] * (pj[k] / ctx.mu - mj[k]) - dcoef[j] * (dj[k] + tj[k]);
      }
    }
    detail::require_finite_stage(out, "ExpRK-V", i + 1);
    return out;
  };

  for (int i = 0; i < nu; ++i) {
    MacroState ui = i == 0 ? u_n
                           : detail::advance_subsystem(u_n, dm, t.a[i], i, ctx.h, clamps,
                                                       "stage " + std::to_string(i + 1));
    PhaseField mi = i == 0 ? m_n : maxwellian(ui, vg, sg);
    PhaseField fi = i == 0 && t.c[0] == 0.0 ? f_n : assemble(i, mi);
    p.push_back(apply_p(ctx.op, fi, ctx.mu));
    div.push_back(divergence(ctx.ts, fi));
    dm.push_back(moments(div.back()));
    dtm.push_back(dt_maxwellian_from_divergence(dm.back(), ui, vg, sg));
    mw.push_back(std::move(mi));
    if (record) {
      record->f_stage.push_back(std::move(fi));
      record->m_stage.push_back(ui);
    }
    u.push_back(std::move(ui));
  }
  MacroState u_next = detail::advance_subsystem(u_n, dm, t.b, nu, ctx.h, clamps, "final step");
  PhaseField m_next = maxwellian(u_next, vg, sg);
  PhaseField next = assemble(nu, m_next);
  if (record) {
    record->p_stage = std::move(p);
    record->div_stage = std::move(div);
    record->dtm_stage = std::move(dtm);
    record->m_final = std::move(u_next);
  }
  return next;
}

enum class Scheme { ExpRkF, ExpRkV };

inline std::string name_of(Scheme s) { return s == Scheme::ExpRkF ? "exprk-f" : "exprk-v"; }

inline Scheme scheme_from_name(const std::string& name) {
  if (name == "exprk-f") return Scheme::ExpRkF;
  if (name == "exprk-v") return Scheme::ExpRkV;
  throw config_error("unknown scheme '" + name + "' (expected exprk-f or exprk-v)");
}

struct SolverConfig {
  Scheme scheme = Scheme::ExpRkF;
  Tableau tab = builtin("midpoint2");
  CollisionOperator op = Bgk{};
  TransportScheme ts = TransportScheme::Weno3;
  double h = 0.0;  ///< nominal step; the final step is shortened to land on t_final
  double mu_safety = 1.05;
  std::optional<double> mu_fixed;        ///< overrides the per-step mu_star refresh
  /// Relative tolerance for mu_star's sign check. High-order transport overshoots
  /// at discontinuities, so by default the run continues and min_relative records it.
  double negative_tolerance = std::numeric_limits<double>::infinity();
};

/// Macro history and diagnostics of a run.
struct Trajectory {
  PhaseField final_state;
  std::vector<double> times;
  std::vector<MacroState> macro;  ///< moments at every step, including t = 0
  std::vector<double> mu;         ///< mu used at each step
  double min_relative = INFINITY;  ///< min over steps of min f / max f
  ClampLog clamps;
  int steps = 0;
};

/// Called after every step with (step index, time, state, stage record or null).
using StepObserver = std::function<void(int, double, const PhaseField&, const StageRecord*)>;

struct AdvanceOptions {
  bool record_stages = false;
  StepObserver observer;
};

/// Number of steps of nominal size h to reach t_final; an integer ratio is honored exactly.
inline int step_count(double t_final, double h) {
  if (t_final <= 0.0) return 0;
  const double ratio = t_final / h;
  const double nearest = std::round(ratio);
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(ratio));
}

/// Integrates from t = 0 to t_final. Each step refreshes mu from mu_star(f^n)
/// unless mu_fixed is set.
inline Trajectory advance(const SolverConfig& cfg, const EpsilonField& eps, const PhaseField& f0, double t_final,
                          const AdvanceOptions& opts = {}) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw config_error("final time must be nonnegative");
  if (!(cfg.h > 0.0)) throw config_error("time step must be positive");
  cfg.tab.validate();
  Trajectory traj{f0, {0.0}, {moments(f0)}, {}, INFINITY, {}, 0};
  auto track_sign = [&](const PhaseField& f) {
    const double mx = f.max_value();
    if (mx > 0.0) traj.min_relative = std::min(traj.min_relative, f.min_value() / mx);
  };
  track_sign(f0);
  const int n = step_count(t_final, cfg.h);
  double t = 0.0;
  for (int step = 0; step < n; ++step) {
    const double h = step + 1 == n ? t_final - step * cfg.h : cfg.h;
    const PhaseField& f = traj.final_state;
    StepContext ctx{cfg.op, cfg.ts, cfg.tab,
                    cfg.mu_fixed ? *cfg.mu_fixed : mu_star(cfg.op, f, cfg.mu_safety, cfg.negative_tolerance), eps,
                    h};
    StageRecord record;
    StageRecord* rec = opts.record_stages ? &record : nullptr;
    PhaseField next = [&] {
      try {
        if (cfg.scheme == Scheme::ExpRkF) {
          const MTilde mt = build_m_tilde(cfg.tab, cfg.ts, traj.macro.back(), f.velocity_grid(), f.spatial_grid(), h);
          if (rec) {
            rec->m_stage = mt.macro.stages;
            rec->m_final = mt.macro.next;
          }
          return exprk_f_step(ctx, f, mt.field, rec);
        }
        return exprk_v_step(ctx, f, rec, &traj.clamps);
      } catch (const numerical_error& e) {
        throw numerical_error(std::string(e.what()) + " (step " + std::to_string(step + 1) + ")");
      }
    }();
    t = step + 1 == n ? t_final : t + h;
    traj.final_state = std::move(next);
    traj.mu.push_back(ctx.mu);
    traj.times.push_back(t);
    traj.macro.push_back(moments(traj.final_state));
    track_sign(traj.final_state);
    traj.steps = step + 1;
    if (opts.observer) opts.observer(step + 1, t, traj.final_state, rec);
  }
  return traj;
}

}  // namespace expkin
