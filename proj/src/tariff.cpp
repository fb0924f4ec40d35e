#include "mgems/tariff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mgems/errors.hpp"
#include "mgems/scenario.hpp"

namespace mgems {

namespace {

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ValidationError(field, message);
}

}  // namespace

void TariffSchedule::validate() const {
  require(std::isfinite(buy_offpeak) && buy_offpeak >= 0.0, "tariff.buy_offpeak",
          "buy_offpeak must be a nonnegative price");
  require(std::isfinite(buy_onpeak) && buy_onpeak >= 0.0, "tariff.buy_onpeak",
          "buy_onpeak must be a nonnegative price");
  require(std::isfinite(sell) && sell >= 0.0, "tariff.sell", "sell must be a nonnegative price");
  // Simultaneous buy/sell is only excluded by cost when buying is never cheaper than selling.
  require(sell <= buy_offpeak && sell <= buy_onpeak, "tariff.sell",
          "sell price exceeds a buy price");

  auto windows = offpeak_windows;
  for (const auto& w : windows) {
    require(std::isfinite(w.start_h) && std::isfinite(w.end_h) && w.start_h >= 0.0 &&
                w.end_h <= 24.0 && w.start_h < w.end_h,
            "tariff.offpeak_windows", "off-peak window must satisfy 0 <= start < end <= 24");
  }
  std::sort(windows.begin(), windows.end(),
            [](const HourWindow& a, const HourWindow& b) { return a.start_h < b.start_h; });
  for (std::size_t i = 1; i < windows.size(); ++i) {
    require(windows[i].start_h >= windows[i - 1].end_h, "tariff.offpeak_windows",
            "off-peak windows overlap");
  }
}

namespace tariff_presets {

TariffSchedule future() { return TariffSchedule{0.68, 0.9105, 0.20, {{0.0, 8.0}}}; }

TariffSchedule actual() { return TariffSchedule{0.1360, 0.1821, 0.10, {{0.0, 8.0}}}; }

std::optional<TariffSchedule> by_name(std::string_view name) {
  if (name == "paper-future") return future();
  if (name == "paper-actual") return actual();
  return std::nullopt;
}

}  // namespace tariff_presets

double buy_price(const TariffSchedule& tariff, std::size_t step, const TimeGrid& time) {
  if (step >= time.n_steps) {
    throw std::out_of_range("step " + std::to_string(step) + " outside horizon of " +
                            std::to_string(time.n_steps) + " steps");
  }
  const double hour = time.step_start_hour(step);
  const bool offpeak = std::any_of(tariff.offpeak_windows.begin(), tariff.offpeak_windows.end(),
                                   [hour](const HourWindow& w) { return w.contains(hour); });
  return offpeak ? tariff.buy_offpeak : tariff.buy_onpeak;
}

double offpeak_hours(const TariffSchedule& tariff, const TimeGrid& time) {
  double hours = 0.0;
  for (std::size_t k = 0; k < time.n_steps; ++k) {
    const double hour = time.step_start_hour(k);
    for (const auto& w : tariff.offpeak_windows) {
      if (w.contains(hour)) {
        hours += time.step_hours;
        break;
      }
    }
  }
  return hours;
}

void AgeingParams::validate() const {
  require(std::isfinite(c_batt_per_kwh) && c_batt_per_kwh > 0.0, "ageing.c_batt_per_kwh",
          "battery price must be positive");
  require(std::isfinite(n_cycles) && n_cycles > 0.0, "ageing.n_cycles",
          "cycle count must be positive");
  require(std::isfinite(dod) && dod > 0.0 && dod <= 1.0, "ageing.dod",
          "depth of discharge must lie in (0, 1]");
  if (c_st_override) {
    require(std::isfinite(*c_st_override) && *c_st_override >= 0.0, "ageing.c_st_override",
            "c_st_override must be a nonnegative price");
  }
}

double lifetime_energy(const AgeingParams& ageing, double e_nom_kwh) {
  return e_nom_kwh * ageing.n_cycles * ageing.dod;
}

double ageing_unit_cost(const AgeingParams& ageing, double e_nom_kwh) {
  if (ageing.c_st_override) return *ageing.c_st_override;
  // Half: one lifetime of exchanged energy counts both the charge and the discharge leg.
  return 0.5 * (ageing.c_batt_per_kwh * e_nom_kwh) / lifetime_energy(ageing, e_nom_kwh);
}

}  // namespace mgems
