#include "mgems/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <openssl/evp.h>

#include <json.hpp>

#include "mgems/errors.hpp"

#ifndef MGEMS_VERSION
#define MGEMS_VERSION "0.0.0"
#endif

namespace mgems {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void check_header(const json& j, const char* kind) {
  if (!j.is_object()) throw ParseError(std::string(kind) + " artifact must be a JSON object");
  const auto ver = j.find("schema_version");
  if (ver == j.end() || !ver->is_number_integer()) {
    throw ParseError(std::string(kind) + " artifact lacks schema_version");
  }
  if (ver->get<int>() != kArtifactSchemaVersion) {
    throw ArtifactMismatchError(std::string(kind) + " artifact schema_version " +
                                std::to_string(ver->get<int>()) + " differs from tool version " +
                                std::to_string(kArtifactSchemaVersion));
  }
  if (j.value("kind", std::string{}) != kind) {
    throw ArtifactMismatchError(std::string("expected a ") + kind + " artifact");
  }
}

template <class T>
T field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("artifact lacks '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("artifact field '") + key + "': " + e.what());
  }
}

// +inf is written as null (JSON has no infinity).
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double null_as_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json model_json(const ElectricalBatteryModel& m) {
  return {{"ocv_at_empty", m.ocv_at_empty}, {"ocv_at_full", m.ocv_at_full},
          {"r_internal", m.r_internal},     {"v_max", finite_or_null(m.v_max)},
          {"v_min", m.v_min},               {"i_charge_max", finite_or_null(m.i_charge_max)},
          {"i_discharge_max", finite_or_null(m.i_discharge_max)},
          {"true_state", m.true_state}};
}

ElectricalBatteryModel apply_model_json(const json& j, ElectricalBatteryModel m) {
  if (!j.is_object()) throw ParseError("battery model must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_null() && !value.is_number()) {
      throw ParseError("battery model field '" + key + "' must be a number or null");
    }
    if (key == "ocv_at_empty") m.ocv_at_empty = value.get<double>();
    else if (key == "ocv_at_full") m.ocv_at_full = value.get<double>();
    else if (key == "r_internal") m.r_internal = value.get<double>();
    else if (key == "v_max") m.v_max = null_as_inf(value);
    else if (key == "v_min") m.v_min = value.get<double>();
    else if (key == "i_charge_max") m.i_charge_max = null_as_inf(value);
    else if (key == "i_discharge_max") m.i_discharge_max = null_as_inf(value);
    else if (key == "true_state") m.true_state = value.get<double>();
    else throw ParseError("unknown battery model field '" + key + "'");
  }
  m.validate();
  return m;
}

}  // namespace

std::string tool_version() { return MGEMS_VERSION; }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string scenario_digest(const Scenario& scenario) {
  const auto ser = serialize_scenario(scenario);
  return sha256_hex(ser.config + '\0' + ser.pv_csv + '\0' + ser.load_csv);
}

std::string schedule_to_csv(const Schedule& s) {
  std::string out = "step,p_g_buy_kw,p_g_sell_kw,p_st_dis_kw,p_st_ch_kw,p_batt_kw,soe_plan\n";
  for (std::size_t t = 0; t < s.n_steps(); ++t) {
    // soe_plan is the state at the end of the step.
    out += std::to_string(t) + ',' + num(s.p_g_buy[t]) + ',' + num(s.p_g_sell[t]) + ',' +
           num(s.p_st_dis[t]) + ',' + num(s.p_st_ch[t]) + ',' + num(s.p_batt[t]) + ',' +
           num(s.soe_plan[t + 1]) + '\n';
  }
  return out;
}

std::string schedule_to_json(const Schedule& s, const std::string& digest) {
  json j = {{"schema_version", kArtifactSchemaVersion},
            {"kind", "schedule"},
            {"tool_version", tool_version()},
            {"scenario_digest", digest},
            {"n_steps", s.n_steps()},
            {"planned_cost", s.planned_cost},
            {"p_g_buy_kw", s.p_g_buy},
            {"p_g_sell_kw", s.p_g_sell},
            {"p_st_dis_kw", s.p_st_dis},
            {"p_st_ch_kw", s.p_st_ch},
            {"p_batt_kw", s.p_batt},
            {"soe_plan", s.soe_plan}};
  return j.dump(2) + "\n";
}

ScheduleArtifact schedule_from_json(std::string_view text) {
  const json j = parse(text, "schedule");
  check_header(j, "schedule");
  ScheduleArtifact a;
  a.scenario_digest = field<std::string>(j, "scenario_digest");
  auto& s = a.schedule;
  s.planned_cost = field<double>(j, "planned_cost");
  s.p_g_buy = field<std::vector<double>>(j, "p_g_buy_kw");
  s.p_g_sell = field<std::vector<double>>(j, "p_g_sell_kw");
  s.p_st_dis = field<std::vector<double>>(j, "p_st_dis_kw");
  s.p_st_ch = field<std::vector<double>>(j, "p_st_ch_kw");
  s.p_batt = field<std::vector<double>>(j, "p_batt_kw");
  s.soe_plan = field<std::vector<double>>(j, "soe_plan");
  const auto n = field<std::size_t>(j, "n_steps");
  for (const auto* v : {&s.p_g_buy, &s.p_g_sell, &s.p_st_dis, &s.p_st_ch, &s.p_batt}) {
    if (v->size() != n) throw LengthMismatchError("schedule artifact", n, v->size());
  }
  if (s.soe_plan.size() != n + 1) throw LengthMismatchError("schedule soe_plan", n + 1, s.soe_plan.size());
  return a;
}

std::string trace_to_csv(const EmulationTrace& tr) {
  std::string out = "time_h,p_batt_kw,i_batt_a,v_batt_v,soc_est,soe_est,p_grid_kw,cv_limited\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out += num(tr.time_h[k]) + ',' + num(tr.p_batt_kw[k]) + ',' + num(tr.i_batt_a[k]) + ',' +
           num(tr.v_batt_v[k]) + ',' + num(tr.soc_est[k]) + ',' + num(tr.soe_est[k]) + ',' +
           num(tr.p_grid_kw[k]) + ',' + (tr.cv_limited[k] ? '1' : '0') + '\n';
  }
  return out;
}

std::string emulation_to_json(const EmulationTrace& tr, const ElectricalBatteryModel& model,
                              const std::string& digest) {
  double cv_hours = 0.0;
  for (bool cv : tr.cv_limited) cv_hours += cv ? tr.dt_hours : 0.0;
  json violations = json::array();
  for (const auto& v : tr.violations) {
    violations.push_back({{"first_substep", v.first_substep},
                          {"last_substep", v.last_substep},
                          {"start_h", tr.time_h[v.first_substep] - tr.dt_hours},
                          {"end_h", tr.time_h[v.last_substep]},
                          {"peak_kw", v.peak_kw},
                          {"kind", v.import ? "import" : "export"}});
  }
  json j = {
      {"schema_version", kArtifactSchemaVersion},
      {"kind", "emulation"},
      {"tool_version", tool_version()},
      {"scenario_digest", digest},
      {"model", model_json(model)},
      {"substeps_per_step", tr.substeps_per_step},
      {"dt_hours", tr.dt_hours},
      {"summary",
       {{"cv_limited_hours", cv_hours},
        {"violation_count", tr.violations.size()},
        {"final_soe_est", tr.boundary_soe_est.empty() ? 0.0 : tr.boundary_soe_est.back()},
        {"final_soc_est", tr.boundary_soc_est.empty() ? 0.0 : tr.boundary_soc_est.back()},
        {"final_true_state",
         tr.boundary_true_state.empty() ? 0.0 : tr.boundary_true_state.back()}}},
      {"violations", violations},
      {"boundaries",
       {{"soc_est", tr.boundary_soc_est},
        {"soe_est", tr.boundary_soe_est},
        {"true_state", tr.boundary_true_state}}},
      {"trace",
       {{"time_h", tr.time_h},
        {"p_batt_kw", tr.p_batt_kw},
        {"i_batt_a", tr.i_batt_a},
        {"v_batt_v", tr.v_batt_v},
        {"soc_est", tr.soc_est},
        {"soe_est", tr.soe_est},
        {"soc_raw", tr.soc_raw},
        {"soe_raw", tr.soe_raw},
        {"true_state", tr.true_state},
        {"p_st_kw", tr.p_st_kw},
        {"p_grid_kw", tr.p_grid_kw},
        {"cv_limited", tr.cv_limited},
        {"floor_limited", tr.floor_limited}}}};
  return j.dump(2) + "\n";
}

EmulationArtifact emulation_from_json(std::string_view text) {
  const json j = parse(text, "emulation");
  check_header(j, "emulation");
  EmulationArtifact a;
  a.scenario_digest = field<std::string>(j, "scenario_digest");
  a.model = apply_model_json(field<json>(j, "model"), ElectricalBatteryModel{});
  auto& tr = a.trace;
  tr.substeps_per_step = field<std::size_t>(j, "substeps_per_step");
  tr.dt_hours = field<double>(j, "dt_hours");
  const json t = field<json>(j, "trace");
  tr.time_h = field<std::vector<double>>(t, "time_h");
  tr.p_batt_kw = field<std::vector<double>>(t, "p_batt_kw");
  tr.i_batt_a = field<std::vector<double>>(t, "i_batt_a");
  tr.v_batt_v = field<std::vector<double>>(t, "v_batt_v");
  tr.soc_est = field<std::vector<double>>(t, "soc_est");
  tr.soe_est = field<std::vector<double>>(t, "soe_est");
  tr.soc_raw = field<std::vector<double>>(t, "soc_raw");
  tr.soe_raw = field<std::vector<double>>(t, "soe_raw");
  tr.true_state = field<std::vector<double>>(t, "true_state");
  tr.p_st_kw = field<std::vector<double>>(t, "p_st_kw");
  tr.p_grid_kw = field<std::vector<double>>(t, "p_grid_kw");
  tr.cv_limited = field<std::vector<bool>>(t, "cv_limited");
  tr.floor_limited = field<std::vector<bool>>(t, "floor_limited");
  const json b = field<json>(j, "boundaries");
  tr.boundary_soc_est = field<std::vector<double>>(b, "soc_est");
  tr.boundary_soe_est = field<std::vector<double>>(b, "soe_est");
  tr.boundary_true_state = field<std::vector<double>>(b, "true_state");
  for (const auto& v : field<json>(j, "violations")) {
    tr.violations.push_back({field<std::size_t>(v, "first_substep"),
                             field<std::size_t>(v, "last_substep"), field<double>(v, "peak_kw"),
                             field<std::string>(v, "kind") == "import"});
  }
  const std::size_t n = tr.time_h.size();
  for (std::size_t len : {tr.p_batt_kw.size(), tr.i_batt_a.size(), tr.v_batt_v.size(),
                          tr.soc_est.size(), tr.soe_est.size(), tr.soc_raw.size(),
                          tr.soe_raw.size(), tr.true_state.size(), tr.p_st_kw.size(),
                          tr.p_grid_kw.size(), tr.cv_limited.size(), tr.floor_limited.size()}) {
    if (len != n) throw LengthMismatchError("emulation trace", n, len);
  }
  if (tr.substeps_per_step == 0 || n % tr.substeps_per_step != 0) {
    throw ParseError("emulation trace length is not a multiple of substeps_per_step");
  }
  return a;
}

ElectricalBatteryModel model_from_json(std::string_view text, ElectricalBatteryModel base) {
  return apply_model_json(parse(text, "battery model"), base);
}

std::string report_to_json(const DiscrepancyReport& r, const std::string& digest) {
  json j = {{"schema_version", kArtifactSchemaVersion},
            {"kind", "report"},
            {"tool_version", tool_version()},
            {"scenario_digest", digest},
            {"planned_cost", r.planned_cost},
            {"realized_cost", r.realized_cost},
            {"cost_error_pct", r.cost_error_pct ? json(*r.cost_error_pct) : json("undefined")},
            {"soe_plan_final", r.soe_plan_final},
            {"soe_est_final", r.soe_est_final},
            {"soc_est_final", r.soc_est_final},
            {"soe_deviation_pct", r.soe_deviation_pct},
            {"max_soe_deviation_pct", r.max_soe_deviation_pct},
            {"cv_limited_hours", r.cv_limited_hours},
            {"violation_count", r.violation_count},
            {"planned_charge_kwh", r.planned_charge_kwh},
            {"realized_charge_kwh", r.realized_charge_kwh},
            {"planned_discharge_kwh", r.planned_discharge_kwh},
            {"realized_discharge_kwh", r.realized_discharge_kwh},
            {"planned_onpeak_purchase_kwh", r.planned_onpeak_purchase_kwh},
            {"realized_onpeak_purchase_kwh", r.realized_onpeak_purchase_kwh}};
  return j.dump(2) + "\n";
}

std::string plot_power_csv(const Scenario& s, const Schedule& sch, const EmulationTrace& tr) {
  std::string out =
      "time_h,p_net_kw,p_batt_ref_kw,p_batt_meas_kw,p_grid_plan_kw,p_grid_real_kw,cv_limited\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const std::size_t t = tr.step_of(k);
    out += num(tr.time_h[k]) + ',' + num(s.pv.values[t] - s.load.values[t]) + ',' +
           num(sch.p_batt[t]) + ',' + num(tr.p_batt_kw[k]) + ',' + num(sch.p_g(t)) + ',' +
           num(tr.p_grid_kw[k]) + ',' + (tr.cv_limited[k] ? '1' : '0') + '\n';
  }
  return out;
}

std::string plot_soe_csv(const Scenario& s, const Schedule& sch, const EmulationTrace& tr) {
  const auto& b = s.battery;
  // The scenario carries one set of state limits; they serve as both SoE and SoC limits.
  const std::string limits = ',' + num(b.soe_min) + ',' + num(b.soe_max) + ',' + num(b.soe_min) +
                             ',' + num(b.soe_max);
  std::string out = "time_h,soe_plan,soe_est,soc_est,soe_min,soe_max,soc_min,soc_max\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const std::size_t t = tr.step_of(k);
    // Plan power is constant within a step, so the planned SoE is linear across it.
    const double frac = static_cast<double>(k % tr.substeps_per_step + 1) /
                        static_cast<double>(tr.substeps_per_step);
    const double plan = sch.soe_plan[t] + frac * (sch.soe_plan[t + 1] - sch.soe_plan[t]);
    out += num(tr.time_h[k]) + ',' + num(plan) + ',' + num(tr.soe_est[k]) + ',' +
           num(tr.soc_est[k]) + limits + '\n';
  }
  return out;
}

std::string RunManifest::to_json() const {
  json j = {{"schema_version", kArtifactSchemaVersion},
            {"kind", "manifest"},
            {"subcommand", subcommand},
            {"scenario_path", scenario_path},
            {"output_dir", output_dir},
            {"parameters", parameters},
            {"input_digests", input_digests},
            {"tool_version", tool_version}};
  return j.dump(2) + "\n";
}

}  // namespace mgems
