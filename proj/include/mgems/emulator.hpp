#pragma once

#include <cstddef>
#include <vector>

#include "mgems/lp_model.hpp"
#include "mgems/scenario.hpp"

namespace mgems {

/// Zeroth-order Thevenin battery: OCV linear in the true state plus a series
/// resistance. Voltages in V, currents in A, discharge current positive.
/// Defaults describe one 6 V / 12 Ah VRLA unit; they are plausible values, not
/// measurements.
struct ElectricalBatteryModel {
  double ocv_at_empty = 5.91;
  double ocv_at_full = 6.45;
  double r_internal = 0.4;  ///< effective, includes charge polarization
  double v_max = 7.35;      ///< CV ceiling
  double v_min = 5.25;      ///< discharge floor
  double i_charge_max = 3.6;
  double i_discharge_max = 6.0;
  double true_state = 0.35;  ///< hidden ground truth, fraction of e_nom

  double ocv(double state) const noexcept {
    return ocv_at_empty + (ocv_at_full - ocv_at_empty) * state;
  }

  void validate() const;

  /// Default unit scaled to the bank (series = v_nom / 6 V, parallel = c_nom / 12 Ah),
  /// starting at the scenario's initial SoE.
  static ElectricalBatteryModel vrla(const BatteryParams& battery);

  /// Near-lossless plant: negligible resistance, unreachable voltage limits and
  /// no current limits. Combined with unit efficiencies it reproduces the plan.
  static ElectricalBatteryModel ideal(const BatteryParams& battery);

  friend bool operator==(const ElectricalBatteryModel&, const ElectricalBatteryModel&) = default;
};

struct GridViolation {
  std::size_t first_substep = 0;
  std::size_t last_substep = 0;
  double peak_kw = 0.0;  ///< most extreme realized grid power in the run
  bool import = true;    ///< true: purchase limit exceeded, false: sale limit
  friend bool operator==(const GridViolation&, const GridViolation&) = default;
};

/// Fine-grained plant measurements, one entry per sub-step. Electrical values are
/// sub-step averages (constant within a sub-step); states are at the sub-step end.
struct EmulationTrace {
  std::size_t substeps_per_step = 1;
  double dt_hours = 0.0;  ///< sub-step length

  std::vector<double> time_h;  ///< end of sub-step, hours since t = t_start, offset by t_start
  std::vector<double> p_batt_kw;
  std::vector<double> i_batt_a;
  std::vector<double> v_batt_v;
  std::vector<double> soc_est;
  std::vector<double> soe_est;
  std::vector<double> soc_raw;
  std::vector<double> soe_raw;
  std::vector<double> true_state;
  std::vector<double> p_st_kw;  ///< realized bus-side storage power
  std::vector<double> p_grid_kw;
  std::vector<bool> cv_limited;
  std::vector<bool> floor_limited;

  /// States at schedule boundaries (n_steps + 1 entries, first is the initial state).
  std::vector<double> boundary_soc_est;
  std::vector<double> boundary_soe_est;
  std::vector<double> boundary_true_state;

  std::vector<GridViolation> violations;

  std::size_t size() const noexcept { return time_h.size(); }
  /// Scheduler step of a sub-step.
  std::size_t step_of(std::size_t k) const noexcept { return k / substeps_per_step; }

  friend bool operator==(const EmulationTrace&, const EmulationTrace&) = default;
};

/// Replays the schedule's battery-side power (held over each step) on the electrical
/// model with CC-CV charge limiting, the grid closing the bus balance.
EmulationTrace emulate(const Scenario& scenario, const Schedule& schedule,
                       const ElectricalBatteryModel& model, std::size_t substeps_per_step = 60);

/// Coulomb-counting SoC estimate after `dt_hours`; clamped to [0, 1].
/// `i_charge` <= 0, `i_discharge` >= 0, amperes.
double soc_update(double soc, double i_charge, double i_discharge, double v, double dt_hours,
                  const BatteryParams& battery);

/// Energy-counting SoE estimate after `dt_hours` using the measured voltage; clamped.
double soe_update(double soe, double i_charge, double i_discharge, double v, double dt_hours,
                  const BatteryParams& battery);

/// Bus-side storage power for a battery-side power (inverse of the converter model).
double bus_power(const BatteryParams& battery, double p_batt_kw);

}  // namespace mgems
