#include "mgems/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "mgems/errors.hpp"

namespace mgems {

using nlohmann::json;

namespace {

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ValidationError(field, message);
}

bool finite_in(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

// Reads `key` from `obj` into `out` when present. Wrong types are parse errors.
void read_number(const json& obj, const char* key, double& out, const std::string& section) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  if (!it->is_number()) throw ParseError(section + "." + key + " must be a number");
  out = it->get<double>();
}

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ParseError(section + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ParseError("unknown key '" + key + "' in " + section);
  }
}

const json* section(const json& root, const char* key) {
  const auto it = root.find(key);
  if (it == root.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(std::string("cannot open ") + what + " file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double TimeGrid::step_start_hour(std::size_t step) const noexcept {
  const double h = std::fmod(t_start + static_cast<double>(step) * step_hours, 24.0);
  return h < 0.0 ? h + 24.0 : h;
}

void TimeGrid::validate() const {
  require(std::isfinite(step_hours) && step_hours > 0.0, "time.step_hours",
          "step_hours must be positive");
  require(n_steps >= 1, "time.n_steps", "n_steps must be at least 1");
  require(finite_in(t_start, 0.0, 24.0) && t_start < 24.0, "time.t_start",
          "t_start must lie in [0, 24)");
  require(multi_day || horizon_hours() <= 24.0 + 1e-9, "time.n_steps",
          "horizon exceeds 24 h without multi_day");
}

void PowerProfile::validate(const TimeGrid& time) const {
  const char* name = kind == ProfileKind::pv ? "pv" : "load";
  if (values.size() != time.n_steps) {
    throw LengthMismatchError(std::string(name) + " profile", time.n_steps, values.size());
  }
  for (double v : values) {
    require(std::isfinite(v) && v >= 0.0, name, std::string(name) + " power must be >= 0");
  }
}

void BatteryParams::validate() const {
  require(std::isfinite(e_nom) && e_nom > 0.0, "battery.e_nom", "e_nom must be positive");
  require(std::isfinite(c_nom) && c_nom > 0.0, "battery.c_nom", "c_nom must be positive");
  require(std::isfinite(v_nom) && v_nom > 0.0, "battery.v_nom", "v_nom must be positive");
  require(finite_in(soe_min, 0.0, 1.0), "battery.soe_min", "soe_min must lie in [0, 1]");
  require(finite_in(soe_max, 0.0, 1.0), "battery.soe_max", "soe_max must lie in [0, 1]");
  require(soe_min <= soe_max, "battery.soe_max", "soe_max below soe_min");
  require(std::isfinite(soe_init), "battery.soe_init", "soe_init must be finite");
  require(soe_init >= soe_min, "battery.soe_init", "soe_init below soe_min");
  require(soe_init <= soe_max, "battery.soe_init", "soe_init above soe_max");
  require(std::isfinite(p_charge_max) && p_charge_max <= 0.0, "battery.p_charge_max",
          "p_charge_max must be <= 0");
  require(std::isfinite(p_discharge_max) && p_discharge_max >= 0.0, "battery.p_discharge_max",
          "p_discharge_max must be >= 0");
  require(finite_in(eta_cvs, 0.0, 1.0) && eta_cvs > 0.0, "battery.eta_cvs",
          "eta_cvs must lie in (0, 1]");
  require(finite_in(eta_e, 0.0, 1.0) && eta_e > 0.0, "battery.eta_e", "eta_e must lie in (0, 1]");
  require(finite_in(eta_f, 0.0, 1.0) && eta_f > 0.0, "battery.eta_f", "eta_f must lie in (0, 1]");
}

void GridParams::validate() const {
  require(std::isfinite(p_buy_max) && p_buy_max >= 0.0, "grid.p_buy_max",
          "p_buy_max must be >= 0");
  require(std::isfinite(p_sell_max) && p_sell_max <= 0.0, "grid.p_sell_max",
          "p_sell_max must be <= 0");
}

void Scenario::validate() const {
  time.validate();
  require(pv.kind == ProfileKind::pv, "pv", "pv profile has the wrong kind");
  require(load.kind == ProfileKind::load, "load", "load profile has the wrong kind");
  pv.validate(time);
  load.validate(time);
  battery.validate();
  grid.validate();
  tariff.validate();
  ageing.validate();
  if (terminal_soe) {
    require(std::isfinite(*terminal_soe) && *terminal_soe >= battery.soe_min &&
                *terminal_soe <= battery.soe_max,
            "terminal_soe", "terminal_soe must lie in [soe_min, soe_max]");
  }
}

std::vector<double> parse_profile_csv(std::string_view csv, std::string_view what) {
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  auto fail = [&](const std::string& msg) {
    throw ParseError(std::string(what) + " line " + std::to_string(line_no) + ": " + msg);
  };
  while (pos < csv.size()) {
    std::size_t end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      if (line != "step_index,power_kw") fail("expected header 'step_index,power_kw'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      fail("expected two columns");
    }
    const auto idx_text = line.substr(0, comma);
    const auto val_text = line.substr(comma + 1);
    std::size_t idx = 0;
    auto r1 = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
    if (r1.ec != std::errc{} || r1.ptr != idx_text.data() + idx_text.size()) {
      fail("bad step_index");
    }
    double v = 0.0;
    auto r2 = std::from_chars(val_text.data(), val_text.data() + val_text.size(), v);
    if (r2.ec != std::errc{} || r2.ptr != val_text.data() + val_text.size()) fail("bad power_kw");
    if (idx != values.size()) fail("step_index out of sequence");
    values.push_back(v);
  }
  if (!header_seen) throw ParseError(std::string(what) + ": empty profile document");
  return values;
}

std::string format_profile_csv(const std::vector<double>& values) {
  std::string out = "step_index,power_kw\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(values[i]);
    out += '\n';
  }
  return out;
}

namespace {

Scenario parse_config(const json& root) {
  check_keys(root, "config",
             {"schema_version", "name", "time", "battery", "grid", "tariff", "ageing",
              "terminal_soe", "profiles"});
  const auto ver = root.find("schema_version");
  if (ver == root.end() || !ver->is_number_integer()) {
    throw ParseError("config.schema_version missing or not an integer");
  }
  if (ver->get<int>() != kScenarioSchemaVersion) {
    throw ParseError("unsupported config schema_version " + std::to_string(ver->get<int>()));
  }

  Scenario s;
  if (auto it = root.find("name"); it != root.end()) {
    if (!it->is_string()) throw ParseError("config.name must be a string");
    s.name = it->get<std::string>();
  }

  if (const json* t = section(root, "time")) {
    check_keys(*t, "time", {"t_start", "step_hours", "n_steps", "multi_day"});
    read_number(*t, "t_start", s.time.t_start, "time");
    read_number(*t, "step_hours", s.time.step_hours, "time");
    if (auto it = t->find("n_steps"); it != t->end()) {
      if (!it->is_number_unsigned()) throw ParseError("time.n_steps must be a nonnegative integer");
      s.time.n_steps = it->get<std::size_t>();
    }
    if (auto it = t->find("multi_day"); it != t->end()) {
      if (!it->is_boolean()) throw ParseError("time.multi_day must be a boolean");
      s.time.multi_day = it->get<bool>();
    }
  }

  if (const json* b = section(root, "battery")) {
    check_keys(*b, "battery",
               {"e_nom", "soe_min", "soe_max", "soe_init", "p_charge_max", "p_discharge_max",
                "eta_cvs", "eta_e", "c_nom", "eta_f", "v_nom", "series", "parallel"});
    auto& bp = s.battery;
    for (auto [key, ref] : {std::pair{"e_nom", &bp.e_nom}, {"soe_min", &bp.soe_min},
                            {"soe_max", &bp.soe_max}, {"soe_init", &bp.soe_init},
                            {"p_charge_max", &bp.p_charge_max},
                            {"p_discharge_max", &bp.p_discharge_max}, {"eta_cvs", &bp.eta_cvs},
                            {"eta_e", &bp.eta_e}, {"c_nom", &bp.c_nom}, {"eta_f", &bp.eta_f},
                            {"v_nom", &bp.v_nom}}) {
      read_number(*b, key, *ref, "battery");
    }
    double series = 1.0;
    double parallel = 1.0;
    read_number(*b, "series", series, "battery");
    read_number(*b, "parallel", parallel, "battery");
    require(std::isfinite(series) && series >= 1.0 && series == std::floor(series),
            "battery.series", "series must be a positive integer");
    require(std::isfinite(parallel) && parallel >= 1.0 && parallel == std::floor(parallel),
            "battery.parallel", "parallel must be a positive integer");
    // Unit values scale to the bank: voltage with series, charge with parallel.
    const double units = series * parallel;
    bp.v_nom *= series;
    bp.c_nom *= parallel;
    bp.e_nom *= units;
    bp.p_charge_max *= units;
    bp.p_discharge_max *= units;
  }

  if (const json* g = section(root, "grid")) {
    check_keys(*g, "grid", {"p_buy_max", "p_sell_max"});
    read_number(*g, "p_buy_max", s.grid.p_buy_max, "grid");
    read_number(*g, "p_sell_max", s.grid.p_sell_max, "grid");
  }

  if (const json* t = section(root, "tariff")) {
    check_keys(*t, "tariff", {"preset", "buy_offpeak", "buy_onpeak", "sell", "offpeak_windows"});
    if (auto it = t->find("preset"); it != t->end()) {
      if (!it->is_string()) throw ParseError("tariff.preset must be a string");
      auto preset = tariff_presets::by_name(it->get<std::string>());
      if (!preset) throw ValidationError("tariff.preset", "unknown tariff preset '" +
                                                             it->get<std::string>() + "'");
      s.tariff = *preset;
    }
    read_number(*t, "buy_offpeak", s.tariff.buy_offpeak, "tariff");
    read_number(*t, "buy_onpeak", s.tariff.buy_onpeak, "tariff");
    read_number(*t, "sell", s.tariff.sell, "tariff");
    if (auto it = t->find("offpeak_windows"); it != t->end()) {
      if (!it->is_array()) throw ParseError("tariff.offpeak_windows must be an array");
      s.tariff.offpeak_windows.clear();
      for (const auto& w : *it) {
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
          throw ParseError("tariff.offpeak_windows entries must be [start_h, end_h]");
        }
        s.tariff.offpeak_windows.push_back({w[0].get<double>(), w[1].get<double>()});
      }
    }
  }

  if (const json* a = section(root, "ageing")) {
    check_keys(*a, "ageing", {"c_batt_per_kwh", "n_cycles", "dod", "c_st_override"});
    read_number(*a, "c_batt_per_kwh", s.ageing.c_batt_per_kwh, "ageing");
    read_number(*a, "n_cycles", s.ageing.n_cycles, "ageing");
    read_number(*a, "dod", s.ageing.dod, "ageing");
    if (auto it = a->find("c_st_override"); it != a->end() && !it->is_null()) {
      if (!it->is_number()) throw ParseError("ageing.c_st_override must be a number");
      s.ageing.c_st_override = it->get<double>();
    }
  }

  if (auto it = root.find("terminal_soe"); it != root.end() && !it->is_null()) {
    if (!it->is_number()) throw ParseError("terminal_soe must be a number or null");
    s.terminal_soe = it->get<double>();
  }
  return s;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

}  // namespace

Scenario load_scenario(std::string_view config_text, std::string_view pv_csv,
                       std::string_view load_csv) {
  Scenario s = parse_config(parse_json(config_text));
  s.pv.values = parse_profile_csv(pv_csv, "pv");
  s.load.values = parse_profile_csv(load_csv, "load");
  s.validate();
  return s;
}

Scenario load_scenario_files(const std::string& config_path,
                             const std::optional<std::string>& pv_path,
                             const std::optional<std::string>& load_path) {
  namespace fs = std::filesystem;
  const std::string config_text = read_file(config_path, "config");
  const json root = parse_json(config_text);
  const fs::path base = fs::path(config_path).parent_path();

  auto resolve = [&](const std::optional<std::string>& given, const char* key) -> fs::path {
    if (given) return *given;
    const json* p = section(root, "profiles");
    if (p == nullptr || !p->contains(key) || !(*p)[key].is_string()) {
      throw ParseError(std::string("config.profiles.") + key + " missing");
    }
    fs::path rel = (*p)[key].get<std::string>();
    return rel.is_absolute() ? rel : base / rel;
  };
  const std::string pv_text = read_file(resolve(pv_path, "pv"), "pv profile");
  const std::string load_text = read_file(resolve(load_path, "load"), "load profile");
  return load_scenario(config_text, pv_text, load_text);
}

SerializedScenario serialize_scenario(const Scenario& s) {
  json root;
  root["schema_version"] = kScenarioSchemaVersion;
  root["name"] = s.name;
  root["time"] = {{"t_start", s.time.t_start},
                  {"step_hours", s.time.step_hours},
                  {"n_steps", s.time.n_steps},
                  {"multi_day", s.time.multi_day}};
  const auto& b = s.battery;
  root["battery"] = {{"e_nom", b.e_nom},
                     {"soe_min", b.soe_min},
                     {"soe_max", b.soe_max},
                     {"soe_init", b.soe_init},
                     {"p_charge_max", b.p_charge_max},
                     {"p_discharge_max", b.p_discharge_max},
                     {"eta_cvs", b.eta_cvs},
                     {"eta_e", b.eta_e},
                     {"c_nom", b.c_nom},
                     {"eta_f", b.eta_f},
                     {"v_nom", b.v_nom}};
  root["grid"] = {{"p_buy_max", s.grid.p_buy_max}, {"p_sell_max", s.grid.p_sell_max}};
  json windows = json::array();
  for (const auto& w : s.tariff.offpeak_windows) windows.push_back({w.start_h, w.end_h});
  root["tariff"] = {{"buy_offpeak", s.tariff.buy_offpeak},
                    {"buy_onpeak", s.tariff.buy_onpeak},
                    {"sell", s.tariff.sell},
                    {"offpeak_windows", windows}};
  root["ageing"] = {{"c_batt_per_kwh", s.ageing.c_batt_per_kwh},
                    {"n_cycles", s.ageing.n_cycles},
                    {"dod", s.ageing.dod},
                    {"c_st_override", s.ageing.c_st_override ? json(*s.ageing.c_st_override)
                                                             : json(nullptr)}};
  root["terminal_soe"] = s.terminal_soe ? json(*s.terminal_soe) : json(nullptr);
  root["profiles"] = {{"pv", "pv.csv"}, {"load", "load.csv"}};
  return {root.dump(2) + "\n", format_profile_csv(s.pv.values), format_profile_csv(s.load.values)};
}

std::vector<double> net_power(const Scenario& scenario) {
  std::vector<double> net(scenario.time.n_steps);
  for (std::size_t t = 0; t < net.size(); ++t) {
    net[t] = scenario.pv.values[t] - scenario.load.values[t];
  }
  return net;
}

std::pair<PowerProfile, PowerProfile> synth_profiles(std::uint64_t seed, const TimeGrid& time,
                                                     double pv_peak, double load_base) {
  std::mt19937_64 rng(seed);
  // mt19937_64 output is fully specified; the uniform mapping is done by hand so the
  // profiles do not depend on the standard library's distribution implementation.
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto bump = [](double h, double centre, double width) {
    const double z = (h - centre) / width;
    return std::exp(-0.5 * z * z);
  };

  PowerProfile pv{std::vector<double>(time.n_steps, 0.0), ProfileKind::pv};
  PowerProfile load{std::vector<double>(time.n_steps, 0.0), ProfileKind::load};
  for (std::size_t k = 0; k < time.n_steps; ++k) {
    const double hour = std::fmod(time.step_start_hour(k) + 0.5 * time.step_hours, 24.0);
    const double cloud = 0.85 + 0.15 * unit();
    const double jitter = 0.95 + 0.10 * unit();
    if (hour >= 6.0 && hour <= 20.0) pv.values[k] = pv_peak * bump(hour, 13.0, 2.8) * cloud;
    load.values[k] =
        load_base * (0.6 + 0.5 * bump(hour, 7.5, 1.2) + 0.9 * bump(hour, 19.5, 1.6)) * jitter;
  }
  return {std::move(pv), std::move(load)};
}

}  // namespace mgems
