#include "mgems/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mgems/errors.hpp"

namespace mgems::lp {

Constraint& LpProblem::add_row(Relation rel, double rhs, std::string name) {
  constraints.push_back({std::vector<double>(n_vars, 0.0), rel, rhs, std::move(name)});
  return constraints.back();
}

void LpProblem::validate() const {
  if (objective.size() != n_vars) {
    throw ValidationError("objective", "objective length differs from n_vars");
  }
  for (double c : objective) {
    if (!std::isfinite(c)) throw ValidationError("objective", "non-finite objective coefficient");
  }
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& row = constraints[i];
    if (row.coeffs.size() != n_vars) {
      throw ValidationError("constraints", "row " + std::to_string(i) + " has wrong length");
    }
    if (!std::isfinite(row.rhs)) {
      throw ValidationError("constraints", "row " + std::to_string(i) + " has non-finite rhs");
    }
    for (double a : row.coeffs) {
      if (!std::isfinite(a)) {
        throw ValidationError("constraints",
                              "row " + std::to_string(i) + " has a non-finite coefficient");
      }
    }
  }
  if (!bounds.empty() && bounds.size() != n_vars) {
    throw ValidationError("bounds", "bounds length differs from n_vars");
  }
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    const auto& b = bounds[j];
    if (!std::isfinite(b.lower) || std::isnan(b.upper) || b.upper == -kInf) {
      throw ValidationError("bounds", "variable " + std::to_string(j) + " has invalid bounds");
    }
    if (b.lower > b.upper) {
      throw ValidationError("bounds", "variable " + std::to_string(j) + " has lower > upper");
    }
  }
}

const char* to_string(Status status) noexcept {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

double pow2_scale(double magnitude) {
  if (magnitude <= 0.0 || !std::isfinite(magnitude)) return 1.0;
  return std::ldexp(1.0, -std::ilogb(magnitude));
}

/// Dense bounded-variable simplex tableau. Columns are ordered structural, slack,
/// artificial; every variable lives in [0, upper].
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows * cols, 0.0), beta_(rows, 0.0), basis_(rows, 0),
        upper_(cols, kInf), at_upper_(cols, false), is_basic_(cols, false),
        excluded_(cols, false), d_(cols, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  const std::vector<double>& data() const { return a_; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  std::vector<double>& beta() { return beta_; }
  std::vector<std::size_t>& basis() { return basis_; }
  std::vector<double>& upper() { return upper_; }
  std::vector<bool>& at_upper() { return at_upper_; }
  std::vector<bool>& is_basic() { return is_basic_; }
  std::vector<bool>& excluded() { return excluded_; }

  /// Reduced costs for cost vector `c` under the current basis.
  void price(const std::vector<double>& c) {
    d_ = c;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &a_[i * n_];
      for (std::size_t j = 0; j < n_; ++j) d_[j] -= cb * row[j];
    }
  }

  enum class Outcome { optimal, unbounded, iteration_limit };

  Outcome run(const SolverOptions& opt, std::size_t& iterations, std::size_t max_iterations) {
    bool bland = false;
    while (true) {
      const auto entering = choose_entering(opt.optimality_tol, bland);
      if (!entering) return Outcome::optimal;
      if (iterations >= max_iterations) return Outcome::iteration_limit;
      ++iterations;

      const std::size_t j = *entering;
      const double sigma = at_upper_[j] ? -1.0 : 1.0;

      // Ratio test over basic variables; -1 marks a bound flip of the entering column.
      double best = upper_[j];
      long leave = -1;
      bool leave_to_upper = false;
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = at(i, j);
        if (std::abs(alpha) <= opt.pivot_tol) continue;
        const double rate = sigma * alpha;  // basic value falls at this rate
        const std::size_t b = basis_[i];
        double ratio;
        bool to_upper;
        if (rate > 0.0) {
          ratio = std::max(beta_[i], 0.0) / rate;
          to_upper = false;
        } else {
          if (upper_[b] == kInf) continue;
          ratio = std::max(upper_[b] - beta_[i], 0.0) / -rate;
          to_upper = true;
        }
        bool take = false;
        if (ratio < best - 1e-12) {
          take = true;
        } else if (ratio <= best + 1e-12 && leave >= 0) {
          take = bland ? b < basis_[static_cast<std::size_t>(leave)]
                       : std::abs(alpha) > best_pivot;
        } else if (ratio <= best + 1e-12 && leave < 0 && best != kInf) {
          // Prefer a basis change over a bound flip at equal step length.
          take = true;
        }
        if (take) {
          best = ratio;
          leave = static_cast<long>(i);
          leave_to_upper = to_upper;
          best_pivot = std::abs(alpha);
        }
      }
      if (best == kInf) return Outcome::unbounded;

      const double step = best;
      bland = step <= 1e-12;
      for (std::size_t i = 0; i < m_; ++i) beta_[i] -= sigma * step * at(i, j);

      if (leave < 0) {
        at_upper_[j] = !at_upper_[j];
        continue;
      }
      const auto r = static_cast<std::size_t>(leave);
      const std::size_t out = basis_[r];
      const double entering_value = at_upper_[j] ? upper_[j] - step : step;
      is_basic_[out] = false;
      at_upper_[out] = leave_to_upper;
      is_basic_[j] = true;
      at_upper_[j] = false;
      basis_[r] = j;
      beta_[r] = entering_value;
      pivot(r, j);
    }
  }

  double value(std::size_t j) const {
    if (!is_basic_[j]) return at_upper_[j] ? upper_[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] == j) return beta_[i];
    }
    return 0.0;
  }

 private:
  std::optional<std::size_t> choose_entering(double tol, bool bland) const {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (is_basic_[j] || excluded_[j]) continue;
      double score = 0.0;
      if (!at_upper_[j] && d_[j] < -tol && upper_[j] > 0.0) score = -d_[j];
      if (at_upper_[j] && d_[j] > tol) score = d_[j];
      if (score == 0.0) continue;
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t j) {
    double* prow = &a_[r * n_];
    const double inv = 1.0 / prow[j];
    for (std::size_t k = 0; k < n_; ++k) prow[k] *= inv;
    prow[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &a_[i * n_];
      const double f = row[j];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n_; ++k) row[k] -= f * prow[k];
      row[j] = 0.0;
    }
    const double f = d_[j];
    if (f != 0.0) {
      for (std::size_t k = 0; k < n_; ++k) d_[k] -= f * prow[k];
      d_[j] = 0.0;
    }
  }

  std::size_t m_, n_;
  std::vector<double> a_;
  std::vector<double> beta_;
  std::vector<std::size_t> basis_;
  std::vector<double> upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  std::vector<bool> excluded_;
  std::vector<double> d_;
};

/// Solves the dense square system in place with partial pivoting; false if singular.
bool solve_dense(std::vector<double>& mat, std::vector<double>& rhs, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(mat[i * n + k]) > std::abs(mat[p * n + k])) p = i;
    }
    if (std::abs(mat[p * n + k]) < 1e-14) return false;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(mat[k * n + c], mat[p * n + c]);
      std::swap(rhs[k], rhs[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = mat[i * n + k] / mat[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) mat[i * n + c] -= f * mat[k * n + c];
      rhs[i] -= f * rhs[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= mat[k * n + c] * rhs[c];
    rhs[k] = s / mat[k * n + k];
  }
  return true;
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SolverOptions& options) {
  problem.validate();
  const std::size_t n = problem.n_vars;
  const std::size_t m = problem.constraints.size();
  const std::size_t max_iter =
      options.max_iterations ? options.max_iterations : 10000 * std::max<std::size_t>(n, 1);

  std::vector<Bound> bounds = problem.bounds.empty() ? std::vector<Bound>(n) : problem.bounds;

  // Shift lower bounds to zero: x = lower + y.
  std::vector<std::vector<double>> rows(m);
  std::vector<double> rhs(m);
  std::vector<Relation> rel(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = problem.constraints[i];
    rows[i] = c.coeffs;
    rel[i] = c.relation;
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift += c.coeffs[j] * bounds[j].lower;
    rhs[i] = c.rhs - shift;
  }

  // Power-of-two equilibration keeps the scaling itself exact.
  std::vector<double> col_scale(n, 1.0);
  if (options.scale) {
    for (std::size_t i = 0; i < m; ++i) {
      double mx = 0.0;
      for (double a : rows[i]) mx = std::max(mx, std::abs(a));
      const double r = pow2_scale(mx);
      for (double& a : rows[i]) a *= r;
      rhs[i] *= r;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double mx = 0.0;
      for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, std::abs(rows[i][j]));
      col_scale[j] = pow2_scale(mx);
      for (std::size_t i = 0; i < m; ++i) rows[i][j] *= col_scale[j];
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (rhs[i] < 0.0) {
      for (double& a : rows[i]) a = -a;
      rhs[i] = -rhs[i];
      if (rel[i] == Relation::less_equal) {
        rel[i] = Relation::greater_equal;
      } else if (rel[i] == Relation::greater_equal) {
        rel[i] = Relation::less_equal;
      }
    }
  }

  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (auto r : rel) {
    if (r != Relation::equal) ++n_slack;
    if (r != Relation::less_equal) ++n_art;
  }
  const std::size_t cols = n + n_slack + n_art;
  Tableau tab(m, cols);

  std::vector<double> phase1_cost(cols, 0.0);
  std::size_t slack_col = n;
  std::size_t art_col = n + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = rows[i][j];
    tab.beta()[i] = rhs[i];
    if (rel[i] != Relation::equal) {
      tab.at(i, slack_col) = rel[i] == Relation::less_equal ? 1.0 : -1.0;
      if (rel[i] == Relation::less_equal) tab.basis()[i] = slack_col;
      ++slack_col;
    }
    if (rel[i] != Relation::less_equal) {
      tab.at(i, art_col) = 1.0;
      tab.basis()[i] = art_col;
      phase1_cost[art_col] = 1.0;
      ++art_col;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double width = bounds[j].upper - bounds[j].lower;
    tab.upper()[j] = width == kInf ? kInf : width / col_scale[j];
  }
  for (std::size_t i = 0; i < m; ++i) tab.is_basic()[tab.basis()[i]] = true;
  const std::vector<double> initial = tab.data();

  LpSolution sol;
  std::size_t iterations = 0;

  if (n_art > 0) {
    tab.price(phase1_cost);
    const auto outcome = tab.run(options, iterations, max_iter);
    if (outcome == Tableau::Outcome::iteration_limit) {
      sol.status = Status::iteration_limit;
      sol.iterations = iterations;
      return sol;
    }
    double infeas = 0.0;
    double rhs_scale = 1.0;
    for (double b : rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
    for (std::size_t j = n + n_slack; j < cols; ++j) infeas += tab.value(j);
    if (infeas > options.feasibility_tol * rhs_scale) {
      sol.status = Status::infeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Artificials are pinned at zero for the rest of the solve.
    for (std::size_t j = n + n_slack; j < cols; ++j) {
      tab.upper()[j] = 0.0;
      tab.excluded()[j] = true;
    }
  }

  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j] * col_scale[j];
  tab.price(cost);
  const auto outcome = tab.run(options, iterations, max_iter);
  sol.iterations = iterations;
  if (outcome == Tableau::Outcome::iteration_limit) {
    sol.status = Status::iteration_limit;
    return sol;
  }
  if (outcome == Tableau::Outcome::unbounded) {
    sol.status = Status::unbounded;
    return sol;
  }

  // Recompute basic values from the final basis to shed accumulated pivot error.
  {
    auto column = [&](std::size_t j, std::size_t i) { return initial[i * cols + j]; };
    std::vector<double> bmat(m * m);
    std::vector<double> b = rhs;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) bmat[i * m + k] = column(tab.basis()[k], i);
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (tab.is_basic()[j] || !tab.at_upper()[j]) continue;
      for (std::size_t i = 0; i < m; ++i) b[i] -= column(j, i) * tab.upper()[j];
    }
    if (m > 0 && solve_dense(bmat, b, m)) {
      for (std::size_t k = 0; k < m; ++k) tab.beta()[k] = b[k];
    }
  }

  sol.status = Status::optimal;
  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double y = tab.value(j) * col_scale[j];
    const double width = bounds[j].upper - bounds[j].lower;
    y = std::clamp(y, 0.0, width);
    sol.x[j] = bounds[j].lower + y;
  }
  sol.objective_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective_value += problem.objective[j] * sol.x[j];
  return sol;
}

std::vector<Violation> check_feasible(const LpProblem& problem, std::span<const double> x,
                                      double tol) {
  if (x.size() != problem.n_vars) {
    throw ValidationError("x", "point dimension differs from n_vars");
  }
  std::vector<Violation> out;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& c = problem.constraints[i];
    double lhs = 0.0;
    for (std::size_t j = 0; j < problem.n_vars; ++j) lhs += c.coeffs[j] * x[j];
    double excess = 0.0;
    switch (c.relation) {
      case Relation::less_equal: excess = lhs - c.rhs; break;
      case Relation::greater_equal: excess = c.rhs - lhs; break;
      case Relation::equal: excess = std::abs(lhs - c.rhs); break;
    }
    if (excess > tol) out.push_back({Violation::Kind::constraint, i, excess, c.name});
  }
  for (std::size_t j = 0; j < problem.bounds.size(); ++j) {
    const auto& b = problem.bounds[j];
    const std::string name = j < problem.var_names.size() ? problem.var_names[j] : std::string{};
    if (b.lower - x[j] > tol) out.push_back({Violation::Kind::lower_bound, j, b.lower - x[j], name});
    if (x[j] - b.upper > tol) out.push_back({Violation::Kind::upper_bound, j, x[j] - b.upper, name});
  }
  if (problem.bounds.empty()) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (-x[j] > tol) out.push_back({Violation::Kind::lower_bound, j, -x[j], {}});
    }
  }
  return out;
}

std::string to_lp_text(const LpProblem& problem) {
  auto var = [&](std::size_t j) {
    if (j < problem.var_names.size() && !problem.var_names[j].empty()) return problem.var_names[j];
    return "x" + std::to_string(j);
  };
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto linear = [&](const std::vector<double>& coeffs) {
    std::string s;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      s += coeffs[j] < 0.0 ? " - " : " + ";
      s += num(std::abs(coeffs[j])) + " " + var(j);
    }
    return s.empty() ? std::string(" 0 ") + var(0) : s;
  };

  std::string out = "\\ LP dump: " + std::to_string(problem.n_vars) + " variables, " +
                    std::to_string(problem.constraints.size()) + " constraints\n";
  out += "Minimize\n obj:" + linear(problem.objective) + "\n";
  out += "Subject To\n";
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& c = problem.constraints[i];
    const std::string name = c.name.empty() ? "c" + std::to_string(i) : c.name;
    const char* op = c.relation == Relation::less_equal      ? " <= "
                     : c.relation == Relation::greater_equal ? " >= "
                                                             : " = ";
    out += " " + name + ":" + linear(c.coeffs) + op + num(c.rhs) + "\n";
  }
  out += "Bounds\n";
  for (std::size_t j = 0; j < problem.n_vars; ++j) {
    const Bound b = problem.bounds.empty() ? Bound{} : problem.bounds[j];
    if (b.upper == kInf) {
      out += " " + var(j) + " >= " + num(b.lower) + "\n";
    } else {
      out += " " + num(b.lower) + " <= " + var(j) + " <= " + num(b.upper) + "\n";
    }
  }
  out += "End\n";
  return out;
}

}  // namespace mgems::lp
