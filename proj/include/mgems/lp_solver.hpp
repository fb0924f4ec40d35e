#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mgems::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

struct Constraint {
  std::vector<double> coeffs;  ///< dense, length n_vars
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
  std::string name;
};

struct Bound {
  double lower = 0.0;  ///< finite
  double upper = kInf;
};

/// Minimize objective . x subject to the rows and per-variable bounds.
struct LpProblem {
  std::size_t n_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<Bound> bounds;          ///< empty means [0, inf) for every variable
  std::vector<std::string> var_names; ///< optional, used by the text dump

  explicit LpProblem(std::size_t n = 0) : n_vars(n), objective(n, 0.0), bounds(n) {}

  Constraint& add_row(Relation rel, double rhs, std::string name = {});

  /// Throws ValidationError on non-finite data, ragged rows or lower > upper.
  void validate() const;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(Status status) noexcept;

struct LpSolution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

struct SolverOptions {
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  /// 0 selects the default of 10,000 iterations per variable.
  std::size_t max_iterations = 0;
  bool scale = true;
};

/// Two-phase primal simplex on a dense tableau. Upper bounds are handled by the
/// bounded-variable ratio test; Bland's rule takes over after a degenerate pivot.
/// Deterministic for a given input.
LpSolution solve(const LpProblem& problem, const SolverOptions& options = {});

struct Violation {
  enum class Kind { constraint, lower_bound, upper_bound };
  Kind kind;
  std::size_t index;  ///< row index or variable index
  double magnitude;
  std::string name;
};

/// Every row or bound violated by more than `tol`. Empty iff `x` is feasible.
std::vector<Violation> check_feasible(const LpProblem& problem, std::span<const double> x,
                                      double tol);

/// Plain-text dump in CPLEX-LP style, one constraint per line.
std::string to_lp_text(const LpProblem& problem);

}  // namespace mgems::lp
