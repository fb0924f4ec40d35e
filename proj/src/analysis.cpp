#include "mgems/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mgems {

namespace {

bool on_peak(const Scenario& s, std::size_t step) {
  const double h = s.time.step_start_hour(step);
  return std::none_of(s.tariff.offpeak_windows.begin(), s.tariff.offpeak_windows.end(),
                      [h](const HourWindow& w) { return w.contains(h); });
}

}  // namespace

std::optional<double> cost_error_pct(double planned, double realized) {
  if (planned == 0.0) return std::nullopt;
  return (realized - planned) / planned * 100.0;
}

double realized_cost(const Scenario& s, const EmulationTrace& tr) {
  if (tr.size() != s.time.n_steps * tr.substeps_per_step) {
    throw LengthMismatchError("trace", s.time.n_steps * tr.substeps_per_step, tr.size());
  }
  const double c_st = s.c_st();
  double cost = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double pg = tr.p_grid_kw[k];
    const double price = pg > 0.0 ? buy_price(s.tariff, tr.step_of(k), s.time) : s.tariff.sell;
    cost += tr.dt_hours * (price * pg + c_st * std::abs(tr.p_st_kw[k]));
  }
  return cost;
}

DiscrepancyReport compare(const Scenario& s, const Schedule& sch, const EmulationTrace& tr) {
  const std::size_t n = s.time.n_steps;
  if (sch.n_steps() != n) throw LengthMismatchError("schedule", n, sch.n_steps());
  if (tr.boundary_soe_est.size() != n + 1) {
    throw LengthMismatchError("trace boundaries", n + 1, tr.boundary_soe_est.size());
  }

  DiscrepancyReport r;
  r.planned_cost = sch.planned_cost;
  r.realized_cost = realized_cost(s, tr);
  r.cost_error_pct = cost_error_pct(r.planned_cost, r.realized_cost);
  r.soe_plan_final = sch.soe_plan.back();
  r.soe_est_final = tr.boundary_soe_est.back();
  r.soc_est_final = tr.boundary_soc_est.back();
  r.soe_deviation_pct = std::abs(r.soe_plan_final - r.soe_est_final) * 100.0;
  for (std::size_t k = 0; k <= n; ++k) {
    r.max_soe_deviation_pct =
        std::max(r.max_soe_deviation_pct, std::abs(sch.soe_plan[k] - tr.boundary_soe_est[k]) * 100.0);
  }
  r.violation_count = tr.violations.size();

  const double dt = s.time.step_hours;
  for (std::size_t t = 0; t < n; ++t) {
    r.planned_charge_kwh += std::max(-sch.p_batt[t], 0.0) * dt;
    r.planned_discharge_kwh += std::max(sch.p_batt[t], 0.0) * dt;
    if (on_peak(s, t)) {
      r.planned_onpeak_purchase_kwh += sch.p_g_buy[t] * dt;
    }
  }
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.cv_limited[k]) r.cv_limited_hours += tr.dt_hours;
    r.realized_charge_kwh += std::max(-tr.p_batt_kw[k], 0.0) * tr.dt_hours;
    r.realized_discharge_kwh += std::max(tr.p_batt_kw[k], 0.0) * tr.dt_hours;
    const std::size_t t = tr.step_of(k);
    if (on_peak(s, t)) {
      r.realized_onpeak_purchase_kwh += std::max(tr.p_grid_kw[k], 0.0) * tr.dt_hours;
    }
  }
  return r;
}

std::string format_report(const DiscrepancyReport& r) {
  std::string out;
  char line[128];
  auto row = [&](const char* label, double value, const char* unit) {
    std::snprintf(line, sizeof line, "%-30s %14.6f%s%s\n", label, value, *unit ? " " : "", unit);
    out += line;
  };
  row("planned cost", r.planned_cost, "EUR");
  row("realized cost", r.realized_cost, "EUR");
  if (r.cost_error_pct) {
    row("cost error", *r.cost_error_pct, "%");
  } else {
    std::snprintf(line, sizeof line, "%-30s %14s %s\n", "cost error", "undefined", "%");
    out += line;
  }
  row("SoE plan (final)", r.soe_plan_final, "");
  row("SoE estimated (final)", r.soe_est_final, "");
  row("SoC estimated (final)", r.soc_est_final, "");
  row("SoE deviation (final)", r.soe_deviation_pct, "pp");
  row("SoE deviation (max)", r.max_soe_deviation_pct, "pp");
  row("CV-limited time", r.cv_limited_hours, "h");
  row("charge energy planned", r.planned_charge_kwh, "kWh");
  row("charge energy realized", r.realized_charge_kwh, "kWh");
  row("discharge energy planned", r.planned_discharge_kwh, "kWh");
  row("discharge energy realized", r.realized_discharge_kwh, "kWh");
  row("on-peak purchase planned", r.planned_onpeak_purchase_kwh, "kWh");
  row("on-peak purchase realized", r.realized_onpeak_purchase_kwh, "kWh");
  std::snprintf(line, sizeof line, "%-30s %14zu\n", "grid contract violations", r.violation_count);
  out += line;
  return out;
}

}  // namespace mgems
