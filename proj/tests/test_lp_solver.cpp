#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "mgems/errors.hpp"
#include "mgems/lp_solver.hpp"
#include "oracles.hpp"

using namespace mgems;
using namespace mgems::lp;
using mgems::testing::Rng;

namespace {

// min -2x - y  s.t.  x + y <= 1,  x <= 0.6,  x, y >= 0
LpProblem two_var_example() {
  LpProblem p(2);
  p.objective = {-2.0, -1.0};
  p.add_row(Relation::less_equal, 1.0, "sum").coeffs = {1.0, 1.0};
  p.add_row(Relation::less_equal, 0.6, "cap").coeffs = {1.0, 0.0};
  return p;
}

}  // namespace

TEST(LpSolver, TwoVariableExampleMatchesVertexEnumeration) {
  const auto p = two_var_example();
  const auto oracle = mgems::testing::enumerate_vertices(p);
  ASSERT_TRUE(oracle.feasible);
  EXPECT_NEAR(oracle.best_objective, -1.6, 1e-12);

  const auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.x[0], 0.6, 1e-12);
  EXPECT_NEAR(sol.x[1], 0.4, 1e-12);
  EXPECT_NEAR(sol.objective_value, -1.6, 1e-12);
  EXPECT_TRUE(check_feasible(p, sol.x, 1e-9).empty());
}

TEST(LpSolver, BoundAttainingMinimum) {
  LpProblem p(1);
  p.objective = {1.0};
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_EQ(sol.x[0], 0.0);
  EXPECT_EQ(sol.objective_value, 0.0);
}

TEST(LpSolver, UnboundedRay) {
  LpProblem p(1);
  p.objective = {-1.0};
  EXPECT_EQ(solve(p).status, Status::unbounded);
}

TEST(LpSolver, ContradictoryRowsAreInfeasible) {
  LpProblem p(1);
  p.objective = {1.0};
  p.add_row(Relation::less_equal, 0.0).coeffs = {1.0};
  p.add_row(Relation::greater_equal, 1.0).coeffs = {1.0};
  const auto sol = solve(p);
  EXPECT_EQ(sol.status, Status::infeasible);
  EXPECT_TRUE(sol.x.empty());
}

TEST(LpSolver, InfeasibleThroughBounds) {
  LpProblem p(2);
  p.objective = {1.0, 1.0};
  p.bounds = {{0.0, 1.0}, {0.0, 1.0}};
  p.add_row(Relation::greater_equal, 3.0).coeffs = {1.0, 1.0};
  EXPECT_EQ(solve(p).status, Status::infeasible);
}

TEST(LpSolver, EqualityAndShiftedBounds) {
  // min x + 2y  s.t.  x + y = 1,  x in [-2, 0.25],  y in [0.5, 3]
  LpProblem p(2);
  p.objective = {1.0, 2.0};
  p.bounds = {{-2.0, 0.25}, {0.5, 3.0}};
  p.add_row(Relation::equal, 1.0).coeffs = {1.0, 1.0};
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.x[0], 0.25, 1e-12);
  EXPECT_NEAR(sol.x[1], 0.75, 1e-12);
  EXPECT_NEAR(sol.objective_value, 1.75, 1e-12);
}

TEST(LpSolver, GreaterEqualRowsNeedPhaseOne) {
  // Diet-style: min 2a + 3b  s.t.  a + 2b >= 4,  3a + b >= 6
  LpProblem p(2);
  p.objective = {2.0, 3.0};
  p.add_row(Relation::greater_equal, 4.0).coeffs = {1.0, 2.0};
  p.add_row(Relation::greater_equal, 6.0).coeffs = {3.0, 1.0};
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.x[0], 1.6, 1e-12);
  EXPECT_NEAR(sol.x[1], 1.2, 1e-12);
  EXPECT_NEAR(sol.objective_value, 6.8, 1e-12);
}

TEST(LpSolver, IterationLimitIsDistinctFromInfeasible) {
  SolverOptions opt;
  opt.max_iterations = 1;
  LpProblem p(2);
  p.objective = {2.0, 3.0};
  p.add_row(Relation::greater_equal, 4.0).coeffs = {1.0, 2.0};
  p.add_row(Relation::greater_equal, 6.0).coeffs = {3.0, 1.0};
  EXPECT_EQ(solve(p, opt).status, Status::iteration_limit);
}

TEST(LpSolver, RejectsMalformedProblems) {
  LpProblem ragged(2);
  ragged.add_row(Relation::equal, 1.0).coeffs = {1.0};
  EXPECT_THROW(solve(ragged), ValidationError);

  LpProblem crossed(1);
  crossed.bounds[0] = {2.0, 1.0};
  EXPECT_THROW(solve(crossed), ValidationError);

  LpProblem nan_rhs(1);
  nan_rhs.add_row(Relation::equal, std::nan("")).coeffs = {1.0};
  EXPECT_THROW(solve(nan_rhs), ValidationError);
}

TEST(CheckFeasible, ReportsConstructedViolation) {
  LpProblem p(1);
  p.add_row(Relation::greater_equal, 1.0, "floor").coeffs = {1.0};
  const std::vector<double> x{0.0};
  const auto report = check_feasible(p, x, 1e-9);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].kind, Violation::Kind::constraint);
  EXPECT_EQ(report[0].name, "floor");
  EXPECT_DOUBLE_EQ(report[0].magnitude, 1.0);
}

TEST(CheckFeasible, FlagsBoundViolations) {
  LpProblem p(2);
  p.bounds = {{0.0, 1.0}, {-1.0, kInf}};
  const std::vector<double> x{1.5, -2.0};
  const auto report = check_feasible(p, x, 1e-9);
  ASSERT_EQ(report.size(), 2u);
  EXPECT_EQ(report[0].kind, Violation::Kind::upper_bound);
  EXPECT_EQ(report[1].kind, Violation::Kind::lower_bound);
  EXPECT_DOUBLE_EQ(report[1].magnitude, 1.0);
}

TEST(CheckFeasible, EnumeratedVerticesAreFeasible) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = mgems::testing::random_bounded_lp(rng, trial % 2 == 0);
    const auto oracle = mgems::testing::enumerate_vertices(p, 1e-11);
    for (const auto& v : oracle.vertices) {
      EXPECT_TRUE(check_feasible(p, v, 1e-9).empty()) << "trial " << trial;
    }
  }
}

TEST(LpSolver, MatchesVertexEnumerationOnRandomLps) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = mgems::testing::random_bounded_lp(rng, trial % 3 == 0);
    const auto oracle = mgems::testing::enumerate_vertices(p);
    const auto sol = solve(p);
    if (!oracle.feasible) {
      EXPECT_EQ(sol.status, Status::infeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(sol.status, Status::optimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective_value, oracle.best_objective, 1e-6) << "trial " << trial;
    EXPECT_TRUE(check_feasible(p, sol.x, 1e-9).empty()) << "trial " << trial;
  }
}

TEST(LpSolver, ObjectiveScalingKeepsStatusAndScalesValue) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = mgems::testing::random_bounded_lp(rng, false);
    const auto base = solve(p);
    const double k = rng.uniform(0.1, 50.0);
    for (auto& c : p.objective) c *= k;
    const auto scaled = solve(p);
    ASSERT_EQ(scaled.status, base.status);
    if (base.status != Status::optimal) continue;
    EXPECT_NEAR(scaled.objective_value, k * base.objective_value,
                1e-9 * (1.0 + std::abs(k * base.objective_value)));
    // The unscaled optimum stays optimal for the scaled objective.
    double at_base = 0.0;
    for (std::size_t j = 0; j < p.n_vars; ++j) at_base += p.objective[j] * base.x[j];
    EXPECT_NEAR(at_base, scaled.objective_value, 1e-9 * (1.0 + std::abs(at_base)));
  }
}

TEST(LpSolver, DegenerateFuzzTerminates) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = mgems::testing::random_bounded_lp(rng, true);
    const auto sol = solve(p);
    EXPECT_NE(sol.status, Status::iteration_limit) << "trial " << trial;
    EXPECT_NE(sol.status, Status::unbounded) << "trial " << trial;
  }
}

TEST(LpSolver, ClassicCyclingExampleTerminates) {
  // Beale's example cycles under the textbook largest-coefficient rule.
  LpProblem p(4);
  p.objective = {-0.75, 150.0, -0.02, 6.0};
  p.add_row(Relation::less_equal, 0.0).coeffs = {0.25, -60.0, -0.04, 9.0};
  p.add_row(Relation::less_equal, 0.0).coeffs = {0.5, -90.0, -0.02, 3.0};
  p.add_row(Relation::less_equal, 1.0).coeffs = {0.0, 0.0, 1.0, 0.0};
  SolverOptions opt;
  opt.scale = false;
  const auto sol = solve(p, opt);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.objective_value, -0.05, 1e-12);
}

TEST(LpSolver, DeterministicAcrossRuns) {
  Rng rng(9);
  const auto p = mgems::testing::random_bounded_lp(rng, false);
  const auto a = solve(p);
  const auto b = solve(p);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(LpText, OneConstraintPerLine) {
  auto p = two_var_example();
  p.var_names = {"x", "y"};
  const std::string text = to_lp_text(p);
  EXPECT_NE(text.find("Minimize\n obj: - 2 x - 1 y\n"), std::string::npos);
  EXPECT_NE(text.find(" sum: + 1 x + 1 y <= 1\n"), std::string::npos);
  EXPECT_NE(text.find(" cap: + 1 x <= 0.59999999999999998\n"), std::string::npos);
  EXPECT_NE(text.find(" x >= 0\n"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 4), "End\n");
}
