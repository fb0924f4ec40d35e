#include "mgems/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mgems {

namespace {

constexpr double kUnitVolts = 6.0;
constexpr double kUnitAmpHours = 12.0;

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ValidationError(field, message);
}

double soc_delta(double i_charge, double i_discharge, double dt, const BatteryParams& b) {
  return -(i_charge * b.eta_f * dt) / b.c_nom - (i_discharge * dt) / b.c_nom;
}

double soe_delta(double i_charge, double i_discharge, double v, double dt,
                 const BatteryParams& b) {
  const double e_wh = b.e_nom * 1000.0;
  return -(i_charge * v * b.eta_f * dt) / e_wh - (i_discharge * v * dt) / e_wh;
}

/// Current (A) that draws `p_w` watts at the terminals of ocv - i*r.
/// Discharge beyond the maximum-power point is capped at that point.
double current_for_power(double ocv, double r, double p_w) {
  const double disc = ocv * ocv - 4.0 * r * p_w;
  if (disc <= 0.0) return ocv / (2.0 * r);
  return 2.0 * p_w / (ocv + std::sqrt(disc));
}

}  // namespace

void ElectricalBatteryModel::validate() const {
  require(std::isfinite(ocv_at_empty) && ocv_at_empty > 0.0, "model.ocv_at_empty",
          "ocv_at_empty must be positive");
  require(std::isfinite(ocv_at_full) && ocv_at_empty < ocv_at_full, "model.ocv_at_full",
          "ocv_at_full must exceed ocv_at_empty");
  require(ocv_at_full <= v_max, "model.v_max", "v_max below ocv_at_full");
  require(v_min < ocv_at_empty, "model.v_min", "v_min must be below ocv_at_empty");
  require(std::isfinite(r_internal) && r_internal > 0.0, "model.r_internal",
          "r_internal must be positive");
  require(i_charge_max > 0.0 && i_discharge_max > 0.0, "model.i_charge_max",
          "current limits must be positive");
  require(std::isfinite(true_state) && true_state >= 0.0 && true_state <= 1.0,
          "model.true_state", "true_state must lie in [0, 1]");
}

ElectricalBatteryModel ElectricalBatteryModel::vrla(const BatteryParams& b) {
  const double series = b.v_nom / kUnitVolts;
  const double parallel = b.c_nom / kUnitAmpHours;
  ElectricalBatteryModel m;
  m.ocv_at_empty *= series;
  m.ocv_at_full *= series;
  m.v_max *= series;
  m.v_min *= series;
  m.r_internal *= series / parallel;
  m.i_charge_max *= parallel;
  m.i_discharge_max *= parallel;
  m.true_state = b.soe_init;
  return m;
}

ElectricalBatteryModel ElectricalBatteryModel::ideal(const BatteryParams& b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  ElectricalBatteryModel m;
  m.ocv_at_empty = 0.98 * b.v_nom;
  m.ocv_at_full = 1.02 * b.v_nom;
  m.r_internal = 1e-9;
  m.v_max = inf;
  m.v_min = 0.0;
  m.i_charge_max = inf;
  m.i_discharge_max = inf;
  m.true_state = b.soe_init;
  return m;
}

double soc_update(double soc, double i_charge, double i_discharge, [[maybe_unused]] double v,
                  double dt_hours, const BatteryParams& battery) {
  return std::clamp(soc + soc_delta(i_charge, i_discharge, dt_hours, battery), 0.0, 1.0);
}

double soe_update(double soe, double i_charge, double i_discharge, double v, double dt_hours,
                  const BatteryParams& battery) {
  return std::clamp(soe + soe_delta(i_charge, i_discharge, v, dt_hours, battery), 0.0, 1.0);
}

double bus_power(const BatteryParams& b, double p_batt_kw) {
  return p_batt_kw >= 0.0 ? p_batt_kw * b.eta_cvs : p_batt_kw / (b.eta_cvs * b.eta_e);
}

EmulationTrace emulate(const Scenario& s, const Schedule& schedule,
                       const ElectricalBatteryModel& model, std::size_t substeps_per_step) {
  s.validate();
  model.validate();
  require(substeps_per_step >= 1, "substeps_per_step", "substeps_per_step must be at least 1");
  const std::size_t n = s.time.n_steps;
  if (schedule.p_batt.size() != n) throw LengthMismatchError("schedule", n, schedule.p_batt.size());

  const auto& b = s.battery;
  const double e_wh = b.e_nom * 1000.0;
  const double dt = s.time.step_hours / static_cast<double>(substeps_per_step);
  const std::size_t total = n * substeps_per_step;

  EmulationTrace tr;
  tr.substeps_per_step = substeps_per_step;
  tr.dt_hours = dt;
  for (auto* v : {&tr.time_h, &tr.p_batt_kw, &tr.i_batt_a, &tr.v_batt_v, &tr.soc_est, &tr.soe_est,
                  &tr.soc_raw, &tr.soe_raw, &tr.true_state, &tr.p_st_kw, &tr.p_grid_kw}) {
    v->reserve(total);
  }

  double state = model.true_state;
  double soc = b.soe_init;
  double soe = b.soe_init;
  double soc_raw = soc;
  double soe_raw = soe;
  tr.boundary_soc_est.push_back(soc);
  tr.boundary_soe_est.push_back(soe);
  tr.boundary_true_state.push_back(state);

  const double r = model.r_internal;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t step = k / substeps_per_step;
    const double ocv = model.ocv(state);
    const double p_cmd_w = schedule.p_batt[step] * 1000.0;

    double i = p_cmd_w == 0.0 ? 0.0 : current_for_power(ocv, r, p_cmd_w);
    i = std::clamp(i, -model.i_charge_max, model.i_discharge_max);
    double v = ocv - i * r;
    bool cv = false;
    bool floor = false;
    if (i < 0.0 && v > model.v_max) {
      i = std::min(0.0, (ocv - model.v_max) / r);
      v = model.v_max;
      cv = true;
    } else if (i > 0.0 && v < model.v_min) {
      i = std::max(0.0, (ocv - model.v_min) / r);
      v = model.v_min;
      floor = true;
    }

    // The true state cannot leave [0, 1]; cut the current at the limit.
    double p_w = v * i;
    const double stored = p_w < 0.0 ? -p_w * b.eta_f * dt / e_wh : -p_w * dt / e_wh;
    if (p_w > 0.0 && state - p_w * dt / e_wh < 0.0) {
      p_w = state * e_wh / dt;
      i = current_for_power(ocv, r, p_w);
      v = ocv - i * r;
      floor = false;
    } else if (p_w < 0.0 && state + stored > 1.0) {
      p_w = -(1.0 - state) * e_wh / (b.eta_f * dt);
      i = current_for_power(ocv, r, p_w);
      v = ocv - i * r;
      cv = false;
    }
    p_w = v * i;
    state += p_w < 0.0 ? -p_w * b.eta_f * dt / e_wh : -p_w * dt / e_wh;
    state = std::clamp(state, 0.0, 1.0);

    const double i_ch = std::min(i, 0.0);
    const double i_dis = std::max(i, 0.0);
    soc_raw += soc_delta(i_ch, i_dis, dt, b);
    soe_raw += soe_delta(i_ch, i_dis, v, dt, b);
    soc = soc_update(soc, i_ch, i_dis, v, dt, b);
    soe = soe_update(soe, i_ch, i_dis, v, dt, b);

    const double p_kw = p_w / 1000.0;
    const double p_st = bus_power(b, p_kw);
    const double p_grid = s.load.values[step] - s.pv.values[step] - p_st;

    tr.time_h.push_back(s.time.t_start + static_cast<double>(k + 1) * dt);
    tr.p_batt_kw.push_back(p_kw);
    tr.i_batt_a.push_back(i);
    tr.v_batt_v.push_back(v);
    tr.soc_est.push_back(soc);
    tr.soe_est.push_back(soe);
    tr.soc_raw.push_back(soc_raw);
    tr.soe_raw.push_back(soe_raw);
    tr.true_state.push_back(state);
    tr.p_st_kw.push_back(p_st);
    tr.p_grid_kw.push_back(p_grid);
    tr.cv_limited.push_back(cv);
    tr.floor_limited.push_back(floor);

    const bool over_import = p_grid > s.grid.p_buy_max + 1e-9;
    const bool over_export = p_grid < s.grid.p_sell_max - 1e-9;
    if (over_import || over_export) {
      auto& vs = tr.violations;
      if (!vs.empty() && vs.back().last_substep + 1 == k && vs.back().import == over_import) {
        vs.back().last_substep = k;
        vs.back().peak_kw = over_import ? std::max(vs.back().peak_kw, p_grid)
                                        : std::min(vs.back().peak_kw, p_grid);
      } else {
        vs.push_back({k, k, p_grid, over_import});
      }
    }

    if ((k + 1) % substeps_per_step == 0) {
      tr.boundary_soc_est.push_back(soc);
      tr.boundary_soe_est.push_back(soe);
      tr.boundary_true_state.push_back(state);
    }
  }
  return tr;
}

}  // namespace mgems
