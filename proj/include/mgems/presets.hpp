#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mgems/scenario.hpp"

namespace mgems::presets {

/// Two 1-hour steps from 07:00: lossless 1 kWh battery at SoE 0.5, buy 0.2 then 0.9,
/// sell 0.05, c_st 0.1, load 0 then 1 kW, no PV. Optimum: charge 0.5 kW, then
/// discharge 1 kW, 0.25 EUR.
Scenario s1();

/// Testbench-scale day shaped like the reference experiment: one 6 V / 12 Ah unit
/// starting at SoE 0.35 with 5 %/95 % limits, a midday PV surplus that the plan uses to
/// fill the battery at full rate, and an evening peak served from storage.
Scenario demo_day();

std::optional<Scenario> by_name(std::string_view name);
std::vector<std::string_view> names();

}  // namespace mgems::presets
