#pragma once

// Explicit Runge-Kutta tableaus, their Shu-Osher form under the relation
// beta_ij = alpha_ij (c_i - c_j), positivity hypotheses, and the decay
// factors R1, R2 that govern relaxation to equilibrium.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "expkin/error.hpp"

namespace expkin {

using Matrix = std::vector<std::vector<double>>;

struct Tableau {
  std::string name;
  Matrix a;  ///< nu x nu, strictly lower triangular
  std::vector<double> b;
  std::vector<double> c;

  int stages() const noexcept { return static_cast<int>(b.size()); }

  /// Throws config_error unless the shape, explicitness, row sums and sum(b) = 1 hold.
  void validate(double tol = 1e-12) const {
    const std::size_t nu = b.size();
    if (nu == 0) throw config_error("tableau '" + name + "' has no stages");
    if (a.size() != nu || c.size() != nu) throw config_error("tableau '" + name + "': a, b, c sizes differ");
    double bsum = 0.0;
    for (std::size_t i = 0; i < nu; ++i) {
      if (a[i].size() != nu) throw config_error("tableau '" + name + "': a must be square");
      double row = 0.0;
      for (std::size_t j = 0; j < nu; ++j) {
        if (!std::isfinite(a[i][j])) throw config_error("tableau '" + name + "': non-finite entry");
        if (j >= i && a[i][j] != 0.0)
          throw config_error("tableau '" + name + "' is not explicit (a must be strictly lower triangular)");
        row += a[i][j];
      }
      if (std::abs(row - c[i]) > tol)
        throw config_error("tableau '" + name + "': row " + std::to_string(i + 1) + " of a does not sum to c");
      bsum += b[i];
    }
    if (std::abs(bsum - 1.0) > tol) throw config_error("tableau '" + name + "': weights b must sum to 1");
  }
};

/// Largest p <= 3 whose order conditions hold to `tol`.
inline int classical_order(const Tableau& t, double tol = 1e-12) {
  const int nu = t.stages();
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < nu; ++i) {
    s1 += t.b[i];
    s2 += t.b[i] * t.c[i];
    s3 += t.b[i] * t.c[i] * t.c[i];
    for (int j = 0; j < nu; ++j) s4 += t.b[i] * t.a[i][j] * t.c[j];
  }
  if (std::abs(s1 - 1.0) > tol) return 0;
  if (std::abs(s2 - 0.5) > tol) return 1;
  if (std::abs(s3 - 1.0 / 3.0) > tol || std::abs(s4 - 1.0 / 6.0) > tol) return 2;
  return 3;
}

inline Tableau builtin(const std::string& name) {
  if (name == "euler1") return {name, {{0.0}}, {1.0}, {0.0}};
  if (name == "midpoint2") return {name, {{0, 0}, {0.5, 0}}, {0.0, 1.0}, {0.0, 0.5}};
  if (name == "heun2") return {name, {{0, 0}, {1.0, 0}}, {0.5, 0.5}, {0.0, 1.0}};
  if (name == "heun3")
    return {name, {{0, 0, 0}, {1.0 / 3.0, 0, 0}, {0, 2.0 / 3.0, 0}}, {0.25, 0.0, 0.75}, {0.0, 1.0 / 3.0, 2.0 / 3.0}};
  if (name == "ssprk3")
    return {name, {{0, 0, 0}, {1.0, 0, 0}, {0.25, 0.25, 0}}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, {0.0, 1.0, 0.5}};
  throw config_error("unknown tableau '" + name + "' (expected euler1, midpoint2, heun2, heun3 or ssprk3)");
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"euler1", "midpoint2", "heun2", "heun3", "ssprk3"};
  return names;
}

struct SignIssue {
  int row;  ///< 1-based; row nu + 1 is the final step
  int col;  ///< 1-based
  char which;  ///< 'a' for alpha, 'b' for beta
  double value;
};

/// Shu-Osher coefficients: row i in 0..nu, where rows 0..nu-1 are the stages
/// and row nu is the final step with abscissa 1. Only j < i is populated
/// (for the final row, all j).
struct ShuOsherForm {
  Tableau parent;
  Matrix alpha;
  Matrix beta;
  std::vector<SignIssue> negatives;

  int rows() const noexcept { return static_cast<int>(alpha.size()); }
  /// Abscissa of row i, with 1 for the final step.
  double abscissa(int i) const noexcept { return i < parent.stages() ? parent.c[i] : 1.0; }
  /// Number of populated columns in row i.
  int width(int i) const noexcept { return std::min(i, parent.stages()); }
};

namespace detail {
/// Butcher row i of the extended tableau (final row uses b).
inline const std::vector<double>& butcher_row(const Tableau& t, int i) { return i < t.stages() ? t.a[i] : t.b; }
}  // namespace detail

/// Solves alpha row by row from a_ij = alpha_ij (c_i - c_j) + sum_{j<k<i} alpha_ik a_kj.
/// The system is triangular; it is singular when c_i = c_j for some populated
/// (i, j), in which case config_error names the row.
inline ShuOsherForm shu_osher_under_relation(const Tableau& t) {
  t.validate();
  const int nu = t.stages();
  ShuOsherForm so;
  so.parent = t;
  so.alpha.assign(nu + 1, std::vector<double>(nu, 0.0));
  so.beta.assign(nu + 1, std::vector<double>(nu, 0.0));
  for (int i = 1; i <= nu; ++i) {
    const double ci = so.abscissa(i);
    const auto& ai = detail::butcher_row(t, i);
    const int width = so.width(i);
    for (int j = width - 1; j >= 0; --j) {
      double residual = ai[j];
      for (int k = j + 1; k < width; ++k) residual -= so.alpha[i][k] * t.a[k][j];
      const double gap = ci - t.c[j];
      if (std::abs(gap) < 1e-14) {
        const std::string what = std::abs(residual) > 1e-14 ? "inconsistent" : "not unique";
        throw config_error("tableau '" + t.name + "': Shu-Osher system under beta = alpha (c_i - c_j) is singular at row " +
                           std::to_string(i + 1) + " (c_" + std::to_string(i + 1) + " = c_" + std::to_string(j + 1) +
                           ", system " + what + ")");
      }
      so.alpha[i][j] = residual / gap;
      so.beta[i][j] = so.alpha[i][j] * gap;
    }
    for (int j = 0; j < width; ++j) {
      if (so.alpha[i][j] < 0) so.negatives.push_back({i + 1, j + 1, 'a', so.alpha[i][j]});
      if (so.beta[i][j] < 0) so.negatives.push_back({i + 1, j + 1, 'b', so.beta[i][j]});
    }
  }
  // Uniqueness follows from the triangular structure; check the reconstruction anyway.
  for (int i = 1; i <= nu; ++i) {
    const auto& ai = detail::butcher_row(t, i);
    for (int j = 0; j < so.width(i); ++j) {
      double rebuilt = so.beta[i][j];
      for (int k = j + 1; k < so.width(i); ++k) rebuilt += so.alpha[i][k] * t.a[k][j];
      if (std::abs(rebuilt - ai[j]) > 1e-13)
        throw numerical_error("Shu-Osher reconstruction failed at row " + std::to_string(i + 1));
    }
  }
  return so;
}

struct Theorem1Report {
  bool representable = true;  ///< Shu-Osher form under the relation exists
  std::string diagnostic;
  bool beta_nonnegative = false;
  bool alpha_nonnegative = false;
  bool ordered = false;  ///< 0 = c_1 < c_2 < ... < c_nu < 1
  std::vector<SignIssue> negatives;

  bool all_pass() const noexcept { return representable && beta_nonnegative && alpha_nonnegative && ordered; }
};

inline bool strictly_ordered(const Tableau& t) {
  if (t.c.empty() || t.c[0] != 0.0) return false;
  for (std::size_t i = 1; i < t.c.size(); ++i)
    if (!(t.c[i] > t.c[i - 1])) return false;
  return t.c.back() < 1.0;
}

inline Theorem1Report validate_theorem1(const ShuOsherForm& so) {
  Theorem1Report r;
  r.negatives = so.negatives;
  r.alpha_nonnegative = std::none_of(so.negatives.begin(), so.negatives.end(), [](auto& s) { return s.which == 'a'; });
  r.beta_nonnegative = std::none_of(so.negatives.begin(), so.negatives.end(), [](auto& s) { return s.which == 'b'; });
  r.ordered = strictly_ordered(so.parent);
  return r;
}

/// Report for a tableau whose Shu-Osher form may not exist.
inline Theorem1Report validate_theorem1(const Tableau& t) {
  try {
    return validate_theorem1(shu_osher_under_relation(t));
  } catch (const config_error& e) {
    t.validate();
    Theorem1Report r;
    r.representable = false;
    r.diagnostic = e.what();
    r.ordered = strictly_ordered(t);
    return r;
  }
}

struct ConvexityWeights {
  std::vector<double> weights;
  double sum = 0.0;
};

/// w_j = exp((c_j - c_i) lambda) (alpha_ij + lambda beta_ij) for row i (0-based, nu = final).
inline ConvexityWeights convexity_weights(const ShuOsherForm& so, int row, double lambda) {
  if (!(lambda >= 0.0)) throw config_error("convexity_weights: lambda must be nonnegative");
  if (row < 1 || row >= so.rows()) throw config_error("convexity_weights: row out of range");
  ConvexityWeights out;
  const double ci = so.abscissa(row);
  for (int j = 0; j < so.width(row); ++j) {
    const double a = so.alpha[row][j], b = so.beta[row][j];
    const double w = (a == 0.0 && b == 0.0) ? 0.0 : std::exp((so.parent.c[j] - ci) * lambda) * (a + lambda * b);
    out.weights.push_back(w);
    out.sum += w;
  }
  return out;
}

struct DecayFactors {
  double r1 = 0.0;        ///< contraction factor of |f - M| over one step
  double r2_scale = 0.0;  ///< max_j |R2_j| / eps, the transport-drift factor
};

/// R1 = e^{-lambda} (1 + z b . (I - z a)^{-1} e) and R2 / eps with z = C lambda / mu,
/// using E^{-1} (I - C A)^{-1} E = (I - z a)^{-1}.
inline DecayFactors r1_r2_diagnostic(const Tableau& t, double lambda, double C, double mu) {
  if (!(lambda >= 0.0) || !(C > 0.0) || !(mu > 0.0))
    throw config_error("r1_r2_diagnostic: need lambda >= 0, C > 0, mu > 0");
  t.validate();
  const int nu = t.stages();
  const double z = C * lambda / mu;
  // Row vector y = b^T (I - z a)^{-1}, solved by back substitution (a is strictly lower).
  std::vector<double> y(nu);
  for (int j = nu - 1; j >= 0; --j) {
    double s = t.b[j];
    for (int i = j + 1; i < nu; ++i) s += y[i] * z * t.a[i][j];
    y[j] = s;
  }
  double ye = 0.0;
  for (double v : y) ye += v;
  DecayFactors out;
  out.r1 = std::exp(-lambda) * (1.0 + z * ye);
  for (int j = 0; j < nu; ++j) {
    double s = y[j];
    for (int i = j + 1; i < nu; ++i) s += y[i] * z * t.a[i][j];
    out.r2_scale = std::max(out.r2_scale, std::abs(lambda / mu * s * std::exp((t.c[j] - 1.0) * lambda)));
  }
  return out;
}

}  // namespace expkin
