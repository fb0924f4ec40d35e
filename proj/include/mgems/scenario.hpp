#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mgems/tariff.hpp"

namespace mgems {

inline constexpr int kScenarioSchemaVersion = 1;

/// Uniform day-ahead time discretization.
struct TimeGrid {
  double t_start = 0.0;    ///< hour-of-day of the first step
  double step_hours = 0.5;
  std::size_t n_steps = 48;
  bool multi_day = false;  ///< allows step_hours * n_steps > 24

  double horizon_hours() const noexcept { return step_hours * static_cast<double>(n_steps); }
  /// Hour-of-day (wrapped into [0, 24)) at which `step` starts.
  double step_start_hour(std::size_t step) const noexcept;

  void validate() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

enum class ProfileKind { pv, load };

/// Mean power per step, kW.
struct PowerProfile {
  std::vector<double> values;
  ProfileKind kind = ProfileKind::load;

  void validate(const TimeGrid& time) const;

  friend bool operator==(const PowerProfile&, const PowerProfile&) = default;
};

/// Battery and converter parameters. Power limits are battery-side (P_batt), with
/// the discharge positive convention. Defaults describe one 6 V / 12 Ah VRLA unit.
struct BatteryParams {
  double e_nom = 0.072;            ///< kWh
  double soe_min = 0.05;
  double soe_max = 0.95;
  double soe_init = 0.35;
  double p_charge_max = -0.025;    ///< kW, <= 0
  double p_discharge_max = 0.012;  ///< kW, >= 0
  double eta_cvs = 0.95;
  double eta_e = 0.85;             ///< round-trip efficiency, applied at charging
  double c_nom = 12.0;             ///< Ah
  double eta_f = 0.96;             ///< faradic efficiency
  double v_nom = 6.0;              ///< V

  void validate() const;

  friend bool operator==(const BatteryParams&, const BatteryParams&) = default;
};

/// Contracted grid powers, kW.
struct GridParams {
  double p_buy_max = 1.0;    ///< >= 0
  double p_sell_max = -1.0;  ///< <= 0

  void validate() const;

  friend bool operator==(const GridParams&, const GridParams&) = default;
};

/// Complete, validated problem instance. Immutable once built.
struct Scenario {
  std::string name = "scenario";
  TimeGrid time;
  PowerProfile pv{{}, ProfileKind::pv};
  PowerProfile load{{}, ProfileKind::load};
  BatteryParams battery;
  GridParams grid;
  TariffSchedule tariff;
  AgeingParams ageing;
  std::optional<double> terminal_soe;

  void validate() const;

  double c_st() const { return ageing_unit_cost(ageing, battery.e_nom); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses a scenario config (JSON) plus PV and load CSVs and validates the result.
/// Throws ParseError, ValidationError or LengthMismatchError.
Scenario load_scenario(std::string_view config_text, std::string_view pv_csv,
                       std::string_view load_csv);

/// Reads the config at `config_path`; profile paths come from the config's
/// `profiles` entry and are resolved against the config's directory unless overridden.
Scenario load_scenario_files(const std::string& config_path,
                             const std::optional<std::string>& pv_path = std::nullopt,
                             const std::optional<std::string>& load_path = std::nullopt);

struct SerializedScenario {
  std::string config;
  std::string pv_csv;
  std::string load_csv;
};

/// Canonical text form; `load_scenario` on the result reproduces the same Scenario.
SerializedScenario serialize_scenario(const Scenario& scenario);

/// Parses a `step_index,power_kw` CSV into power values.
std::vector<double> parse_profile_csv(std::string_view csv, std::string_view what);
std::string format_profile_csv(const std::vector<double>& values);

/// P_pv(t) - P_load(t) per step.
std::vector<double> net_power(const Scenario& scenario);

/// Deterministic synthetic day: PV bell centred on 13:00 (zero between 20:00 and
/// 06:00) and a load with morning and evening peaks. Both nonnegative.
std::pair<PowerProfile, PowerProfile> synth_profiles(std::uint64_t seed, const TimeGrid& time,
                                                     double pv_peak, double load_base);

}  // namespace mgems
