#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace mgems {

struct TimeGrid;

/// Half-open hour-of-day interval [start_h, end_h) with 0 <= start_h < end_h <= 24.
struct HourWindow {
  double start_h = 0.0;
  double end_h = 0.0;

  bool contains(double hour_of_day) const noexcept {
    return hour_of_day >= start_h && hour_of_day < end_h;
  }
  double length() const noexcept { return end_h - start_h; }

  friend bool operator==(const HourWindow&, const HourWindow&) = default;
};

/// Time-of-use tariff. Prices in EUR/kWh; the sell price is constant over the day.
struct TariffSchedule {
  double buy_offpeak = 0.68;
  double buy_onpeak = 0.9105;
  double sell = 0.20;
  std::vector<HourWindow> offpeak_windows{{0.0, 8.0}};

  /// Throws ValidationError on negative prices, malformed or overlapping windows,
  /// or a sell price above either buy price.
  void validate() const;

  friend bool operator==(const TariffSchedule&, const TariffSchedule&) = default;
};

namespace tariff_presets {
/// Extrapolated future prices (5x purchase, 2x sale). This is the default.
TariffSchedule future();
/// Regulated French tariffs for a PV system <= 9 kWc.
TariffSchedule actual();
/// Looks up "paper-future" / "paper-actual"; nullopt for unknown names.
std::optional<TariffSchedule> by_name(std::string_view name);
}  // namespace tariff_presets

/// Purchase price of the step, chosen by whether the step's start time falls in
/// an off-peak window. Throws std::out_of_range if `step >= time.n_steps`.
double buy_price(const TariffSchedule& tariff, std::size_t step, const TimeGrid& time);

/// Hours of the horizon priced off-peak (sum of step lengths).
double offpeak_hours(const TariffSchedule& tariff, const TimeGrid& time);

/// Cycle-ageing parameters. Defaults reproduce c_st = 0.235 EUR/kWh with
/// c_batt = 85 EUR/kWh; the (n_cycles, dod) pair is a calibration, not a datasheet value.
struct AgeingParams {
  double c_batt_per_kwh = 85.0;
  double n_cycles = 226.0;
  double dod = 0.8;
  std::optional<double> c_st_override;

  void validate() const;

  friend bool operator==(const AgeingParams&, const AgeingParams&) = default;
};

/// Energy the battery can exchange over its life: e_nom * n_cycles * dod (kWh).
double lifetime_energy(const AgeingParams& ageing, double e_nom_kwh);

/// Ageing cost per kWh exchanged, half of battery price over lifetime energy.
/// The override, when set, is returned verbatim.
double ageing_unit_cost(const AgeingParams& ageing, double e_nom_kwh);

}  // namespace mgems
