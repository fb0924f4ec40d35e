#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgems/errors.hpp"
#include "mgems/lp_solver.hpp"
#include "mgems/scenario.hpp"

namespace mgems {

/// Column layout of the scheduling LP. Per step t the four power columns are
/// grid purchase, grid sale (negated), storage discharge and storage charge (negated),
/// all nonnegative. SoE columns follow, one per step boundary 1..n.
struct DecisionLayout {
  std::size_t n_steps = 0;

  std::size_t grid_buy(std::size_t t) const noexcept { return 4 * t; }
  std::size_t grid_sell(std::size_t t) const noexcept { return 4 * t + 1; }
  std::size_t st_dis(std::size_t t) const noexcept { return 4 * t + 2; }
  std::size_t st_ch(std::size_t t) const noexcept { return 4 * t + 3; }
  /// SoE after step t, i.e. at boundary t + 1.
  std::size_t soe_after(std::size_t t) const noexcept { return 4 * n_steps + t; }

  std::size_t decision_count() const noexcept { return 4 * n_steps; }
  std::size_t var_count() const noexcept { return 5 * n_steps; }
};

/// Day-ahead plan. Power fields are per step (bus side except p_batt);
/// soe_plan has n_steps + 1 entries, starting with soe_init.
struct Schedule {
  std::vector<double> p_g_buy;   ///< kW, >= 0
  std::vector<double> p_g_sell;  ///< kW, <= 0
  std::vector<double> p_st_dis;  ///< kW, >= 0
  std::vector<double> p_st_ch;   ///< kW, <= 0
  std::vector<double> p_batt;    ///< battery-side power, kW
  std::vector<double> soe_plan;
  double planned_cost = 0.0;     ///< EUR

  std::size_t n_steps() const noexcept { return p_g_buy.size(); }
  double p_st(std::size_t t) const { return p_st_dis[t] + p_st_ch[t]; }
  double p_g(std::size_t t) const { return p_g_buy[t] + p_g_sell[t]; }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct ScheduleLp {
  lp::LpProblem problem;
  DecisionLayout layout;
};

/// Builds the scheduling LP: per-step power balance, SoE recursion with box bounds at
/// every boundary, grid and storage bounds, optional terminal SoE floor. Ageing is
/// charged on throughput in both directions.
ScheduleLp build_lp(const Scenario& scenario);

/// Planned cost of a schedule under the scenario's tariffs and ageing cost.
double objective_cost(const Scenario& scenario, const Schedule& schedule);

/// Battery-side power from bus-side storage power (converter and charge losses).
double battery_power(const BatteryParams& battery, double p_st_dis, double p_st_ch);

/// SoE after one step of the given bus-side storage powers.
double next_soe(const BatteryParams& battery, double soe, double p_st_dis, double p_st_ch,
                double dt_hours);

/// Throws ModelError unless the solution is optimal.
Schedule extract_schedule(const Scenario& scenario, const ScheduleLp& lp,
                          const lp::LpSolution& solution);

/// Class of constraint that makes a scenario infeasible.
enum class BindingClass { import_capacity, export_capacity, state_of_energy };

const char* to_string(BindingClass c) noexcept;

class InfeasibleError : public Error {
 public:
  InfeasibleError(BindingClass cls, std::size_t step, const std::string& message)
      : Error(message), class_(cls), step_(step) {}
  BindingClass binding_class() const noexcept { return class_; }
  std::size_t step() const noexcept { return step_; }

 private:
  BindingClass class_;
  std::size_t step_;
};

/// Solver returned something other than optimal/infeasible (unbounded, iteration limit).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// build_lp -> solve -> extract_schedule. Throws InfeasibleError or ModelError.
Schedule solve_day_ahead(const Scenario& scenario, const lp::SolverOptions& options = {});

/// Residuals and complementarity checks on a schedule; empty when all invariants hold.
std::vector<std::string> schedule_invariant_violations(const Scenario& scenario,
                                                       const Schedule& schedule,
                                                       double power_tol = 1e-6,
                                                       double soe_tol = 1e-9);

}  // namespace mgems
