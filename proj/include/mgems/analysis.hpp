#pragma once

#include <optional>
#include <string>

#include "mgems/emulator.hpp"
#include "mgems/lp_model.hpp"
#include "mgems/scenario.hpp"

namespace mgems {

/// Planned-versus-realized comparison of one day.
struct DiscrepancyReport {
  double planned_cost = 0.0;   ///< EUR
  double realized_cost = 0.0;  ///< EUR
  std::optional<double> cost_error_pct;  ///< empty when planned_cost == 0
  double soe_plan_final = 0.0;
  double soe_est_final = 0.0;
  double soc_est_final = 0.0;
  double soe_deviation_pct = 0.0;      ///< |plan - est| at the horizon end, percentage points
  double max_soe_deviation_pct = 0.0;  ///< over all schedule boundaries
  double cv_limited_hours = 0.0;
  std::size_t violation_count = 0;

  // Energy accounting, kWh, battery side.
  double planned_charge_kwh = 0.0;
  double realized_charge_kwh = 0.0;
  double planned_discharge_kwh = 0.0;
  double realized_discharge_kwh = 0.0;
  // Grid purchases during on-peak steps, kWh.
  double planned_onpeak_purchase_kwh = 0.0;
  double realized_onpeak_purchase_kwh = 0.0;
};

/// Percentage cost error relative to `planned`; nullopt when planned is zero.
std::optional<double> cost_error_pct(double planned, double realized);

/// Tariff cost of the realized grid flows plus ageing on measured bus-side throughput.
double realized_cost(const Scenario& scenario, const EmulationTrace& trace);

DiscrepancyReport compare(const Scenario& scenario, const Schedule& schedule,
                          const EmulationTrace& trace);

/// Fixed-width text table of the report.
std::string format_report(const DiscrepancyReport& report);

}  // namespace mgems
