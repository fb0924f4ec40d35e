#include "mgems/presets.hpp"

#include <cmath>

namespace mgems::presets {

Scenario s1() {
  Scenario s;
  s.name = "s1";
  s.time = {7.0, 1.0, 2, false};
  s.pv.values = {0.0, 0.0};
  s.load.values = {0.0, 1.0};
  auto& b = s.battery;
  b.e_nom = 1.0;
  b.soe_min = 0.0;
  b.soe_max = 1.0;
  b.soe_init = 0.5;
  b.p_charge_max = -1.0;
  b.p_discharge_max = 1.0;
  b.eta_cvs = 1.0;
  b.eta_e = 1.0;
  b.eta_f = 1.0;
  b.c_nom = 12.0;
  b.v_nom = 6.0;
  s.grid = {10.0, -10.0};
  s.tariff = {0.2, 0.9, 0.05, {{0.0, 8.0}}};
  s.ageing.c_st_override = 0.1;
  return s;
}

Scenario demo_day() {
  Scenario s;
  s.name = "demo-day";
  s.time = {0.0, 0.5, 48, false};
  s.tariff = tariff_presets::future();
  s.grid = {0.1, -0.1};
  s.pv.values.resize(48);
  s.load.values.resize(48);
  auto bump = [](double h, double centre, double width) {
    const double z = (h - centre) / width;
    return std::exp(-0.5 * z * z);
  };
  for (std::size_t k = 0; k < 48; ++k) {
    const double h = 0.5 * static_cast<double>(k) + 0.25;
    const double pv = (h >= 7.0 && h <= 19.5) ? 0.055 * bump(h, 13.25, 1.6) : 0.0;
    const double load = 0.012 + 0.010 * bump(h, 7.5, 1.0) + 0.022 * bump(h, 19.5, 1.8);
    // Rounded to 0.1 W so the shipped CSVs are short and exact.
    s.pv.values[k] = std::round(pv * 1e4) / 1e4;
    s.load.values[k] = std::round(load * 1e4) / 1e4;
  }
  return s;
}

std::optional<Scenario> by_name(std::string_view name) {
  if (name == "s1") return s1();
  if (name == "demo-day") return demo_day();
  return std::nullopt;
}

std::vector<std::string_view> names() { return {"s1", "demo-day"}; }

}  // namespace mgems::presets
