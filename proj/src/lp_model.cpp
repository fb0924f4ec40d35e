#include "mgems/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mgems {

namespace {

std::string indexed(const char* base, std::size_t t) { return base + std::string("_") + std::to_string(t); }

// Bus-side storage limits implied by the battery-side power limits.
double bus_discharge_max(const BatteryParams& b) { return b.p_discharge_max * b.eta_cvs; }
double bus_charge_max(const BatteryParams& b) { return b.p_charge_max / (b.eta_cvs * b.eta_e); }

// Negation that never produces -0.0.
double negate(double v) { return 0.0 - v; }

}  // namespace

ScheduleLp build_lp(const Scenario& s) {
  s.validate();
  const auto& b = s.battery;
  const std::size_t n = s.time.n_steps;
  const double dt = s.time.step_hours;
  const double c_st = s.c_st();
  const double soe_drop_per_dis = dt / (b.eta_cvs * b.e_nom);
  const double soe_gain_per_ch = b.eta_cvs * b.eta_e * dt / b.e_nom;

  ScheduleLp out{lp::LpProblem(5 * n), DecisionLayout{n}};
  auto& p = out.problem;
  const auto& L = out.layout;
  p.var_names.resize(p.n_vars);

  for (std::size_t t = 0; t < n; ++t) {
    p.var_names[L.grid_buy(t)] = indexed("p_g_buy", t);
    p.var_names[L.grid_sell(t)] = indexed("neg_p_g_sell", t);
    p.var_names[L.st_dis(t)] = indexed("p_st_dis", t);
    p.var_names[L.st_ch(t)] = indexed("neg_p_st_ch", t);
    p.var_names[L.soe_after(t)] = indexed("soe", t + 1);

    p.bounds[L.grid_buy(t)] = {0.0, s.grid.p_buy_max};
    p.bounds[L.grid_sell(t)] = {0.0, negate(s.grid.p_sell_max)};
    p.bounds[L.st_dis(t)] = {0.0, bus_discharge_max(b)};
    p.bounds[L.st_ch(t)] = {0.0, negate(bus_charge_max(b))};
    p.bounds[L.soe_after(t)] = {b.soe_min, b.soe_max};

    const double buy = buy_price(s.tariff, t, s.time);
    p.objective[L.grid_buy(t)] = dt * buy;
    p.objective[L.grid_sell(t)] = -dt * s.tariff.sell;
    p.objective[L.st_dis(t)] = dt * c_st;
    p.objective[L.st_ch(t)] = dt * c_st;
  }
  if (s.terminal_soe) {
    auto& last = p.bounds[L.soe_after(n - 1)];
    last.lower = std::max(last.lower, *s.terminal_soe);
  }

  // Power balance: P_g + P_st = P_load - P_pv.
  for (std::size_t t = 0; t < n; ++t) {
    auto& row = p.add_row(lp::Relation::equal, s.load.values[t] - s.pv.values[t],
                          indexed("balance", t));
    row.coeffs[L.grid_buy(t)] = 1.0;
    row.coeffs[L.grid_sell(t)] = -1.0;
    row.coeffs[L.st_dis(t)] = 1.0;
    row.coeffs[L.st_ch(t)] = -1.0;
  }
  // SoE recursion; the initial state is a constant on the right-hand side.
  for (std::size_t t = 0; t < n; ++t) {
    auto& row = p.add_row(lp::Relation::equal, t == 0 ? b.soe_init : 0.0, indexed("soe_link", t));
    row.coeffs[L.soe_after(t)] = 1.0;
    if (t > 0) row.coeffs[L.soe_after(t - 1)] = -1.0;
    row.coeffs[L.st_dis(t)] = soe_drop_per_dis;
    row.coeffs[L.st_ch(t)] = -soe_gain_per_ch;
  }
  return out;
}

double battery_power(const BatteryParams& b, double p_st_dis, double p_st_ch) {
  return p_st_dis / b.eta_cvs + p_st_ch * b.eta_cvs * b.eta_e;
}

double next_soe(const BatteryParams& b, double soe, double p_st_dis, double p_st_ch,
                double dt_hours) {
  return soe - p_st_dis * dt_hours / (b.eta_cvs * b.e_nom) -
         p_st_ch * b.eta_cvs * b.eta_e * dt_hours / b.e_nom;
}

double objective_cost(const Scenario& s, const Schedule& sch) {
  const std::size_t n = s.time.n_steps;
  for (const auto* v : {&sch.p_g_buy, &sch.p_g_sell, &sch.p_st_dis, &sch.p_st_ch}) {
    if (v->size() != n) throw LengthMismatchError("schedule", n, v->size());
  }
  const double c_st = s.c_st();
  double cost = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    cost += buy_price(s.tariff, t, s.time) * sch.p_g_buy[t] + s.tariff.sell * sch.p_g_sell[t] +
            c_st * sch.p_st_dis[t] - c_st * sch.p_st_ch[t];
  }
  return s.time.step_hours * cost;
}

Schedule extract_schedule(const Scenario& s, const ScheduleLp& model,
                          const lp::LpSolution& solution) {
  if (solution.status != lp::Status::optimal) {
    throw ModelError(std::string("cannot extract a schedule from a ") +
                     lp::to_string(solution.status) + " solution");
  }
  const auto& L = model.layout;
  const std::size_t n = L.n_steps;
  if (solution.x.size() != L.var_count() || n != s.time.n_steps) {
    throw LengthMismatchError("solution", L.var_count(), solution.x.size());
  }
  auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };

  Schedule sch;
  sch.p_g_buy.resize(n);
  sch.p_g_sell.resize(n);
  sch.p_st_dis.resize(n);
  sch.p_st_ch.resize(n);
  sch.p_batt.resize(n);
  sch.soe_plan.resize(n + 1);
  sch.soe_plan[0] = s.battery.soe_init;
  for (std::size_t t = 0; t < n; ++t) {
    sch.p_g_buy[t] = snap(solution.x[L.grid_buy(t)]);
    sch.p_g_sell[t] = negate(snap(solution.x[L.grid_sell(t)]));
    sch.p_st_dis[t] = snap(solution.x[L.st_dis(t)]);
    sch.p_st_ch[t] = negate(snap(solution.x[L.st_ch(t)]));
    sch.p_batt[t] = battery_power(s.battery, sch.p_st_dis[t], sch.p_st_ch[t]);
    sch.soe_plan[t + 1] = next_soe(s.battery, sch.soe_plan[t], sch.p_st_dis[t], sch.p_st_ch[t],
                                   s.time.step_hours);
  }
  sch.planned_cost = objective_cost(s, sch);
  return sch;
}

const char* to_string(BindingClass c) noexcept {
  switch (c) {
    case BindingClass::import_capacity: return "import_capacity";
    case BindingClass::export_capacity: return "export_capacity";
    case BindingClass::state_of_energy: return "state_of_energy";
  }
  return "unknown";
}

namespace {

InfeasibleError diagnose_infeasible(const Scenario& s) {
  const auto& b = s.battery;
  const std::size_t n = s.time.n_steps;
  for (std::size_t t = 0; t < n; ++t) {
    const double net = s.load.values[t] - s.pv.values[t];
    if (net > s.grid.p_buy_max + bus_discharge_max(b) + 1e-9) {
      std::ostringstream msg;
      msg << "step " << t << ": net demand " << net
          << " kW exceeds grid import plus battery discharge capability";
      return InfeasibleError(BindingClass::import_capacity, t, msg.str());
    }
    if (net < s.grid.p_sell_max + bus_charge_max(b) - 1e-9) {
      std::ostringstream msg;
      msg << "step " << t << ": net surplus " << -net
          << " kW exceeds grid export plus battery charge capability";
      return InfeasibleError(BindingClass::export_capacity, t, msg.str());
    }
  }
  // Power limits hold step by step, so energy is what binds. Replay the battery use the
  // grid contract forces and report where the SoE box first breaks.
  double soe = b.soe_init;
  for (std::size_t t = 0; t < n; ++t) {
    const double net = s.load.values[t] - s.pv.values[t];
    const double forced = net - std::clamp(net, s.grid.p_sell_max, s.grid.p_buy_max);
    soe = next_soe(b, soe, std::max(forced, 0.0), std::min(forced, 0.0), s.time.step_hours);
    if (soe < b.soe_min - 1e-9 || soe > b.soe_max + 1e-9) {
      std::ostringstream msg;
      msg << "step " << t << ": grid contract forces the battery outside its SoE limits";
      return InfeasibleError(BindingClass::state_of_energy, t, msg.str());
    }
  }
  return InfeasibleError(BindingClass::state_of_energy, n - 1,
                         "terminal SoE requirement cannot be met");
}

}  // namespace

Schedule solve_day_ahead(const Scenario& s, const lp::SolverOptions& options) {
  const ScheduleLp model = build_lp(s);
  const lp::LpSolution sol = lp::solve(model.problem, options);
  switch (sol.status) {
    case lp::Status::optimal: break;
    case lp::Status::infeasible: throw diagnose_infeasible(s);
    case lp::Status::unbounded:
      // Every column is boxed, so this indicates a modelling bug.
      throw ModelError("scheduling LP reported unbounded");
    case lp::Status::iteration_limit: throw ModelError("scheduling LP hit the iteration limit");
  }
  return extract_schedule(s, model, sol);
}

std::vector<std::string> schedule_invariant_violations(const Scenario& s, const Schedule& sch,
                                                       double power_tol, double soe_tol) {
  std::vector<std::string> out;
  const auto& b = s.battery;
  for (std::size_t t = 0; t < sch.n_steps(); ++t) {
    const double residual = sch.p_g(t) + sch.p_st(t) + s.pv.values[t] - s.load.values[t];
    if (std::abs(residual) > power_tol) {
      out.push_back("step " + std::to_string(t) + ": power balance residual " +
                    std::to_string(residual));
    }
    if (std::min(sch.p_st_dis[t], -sch.p_st_ch[t]) > power_tol) {
      out.push_back("step " + std::to_string(t) + ": simultaneous charge and discharge");
    }
    if (std::min(sch.p_g_buy[t], -sch.p_g_sell[t]) > power_tol) {
      out.push_back("step " + std::to_string(t) + ": simultaneous purchase and sale");
    }
  }
  for (std::size_t k = 0; k < sch.soe_plan.size(); ++k) {
    if (sch.soe_plan[k] < b.soe_min - soe_tol || sch.soe_plan[k] > b.soe_max + soe_tol) {
      out.push_back("boundary " + std::to_string(k) + ": SoE " + std::to_string(sch.soe_plan[k]) +
                    " outside limits");
    }
  }
  return out;
}

}  // namespace mgems
