// mgems command-line front end: schedule, emulate, compare, sweep, preset.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mgems/analysis.hpp"
#include "mgems/artifacts.hpp"
#include "mgems/emulator.hpp"
#include "mgems/errors.hpp"
#include "mgems/lp_model.hpp"
#include "mgems/presets.hpp"
#include "mgems/scenario.hpp"

namespace fs = std::filesystem;
using namespace mgems;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kInput = 2,
  kInfeasible = 3,
  kModel = 4,
  kMismatch = 5,
};

/// Files are collected in memory and written only once every computation succeeded.
using Outputs = std::vector<std::pair<std::string, std::string>>;

std::string read_text(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(std::string("cannot open ") + what + " file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_outputs(const fs::path& dir, const Outputs& files) {
  fs::create_directories(dir);
  for (const auto& [name, body] : files) {
    const fs::path target = dir / name;
    const fs::path tmp = dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + target.string() + "'");
      out << body;
    }
    fs::rename(tmp, target);
  }
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct ScenarioInput {
  std::string path;
  std::optional<std::string> pv;
  std::optional<std::string> load;
};

struct LoadedScenario {
  Scenario scenario;
  std::string digest;
  std::map<std::string, std::string> input_digests;
};

LoadedScenario load_input(const ScenarioInput& in) {
  LoadedScenario out;
  out.input_digests["scenario_file"] = sha256_hex(read_text(in.path, "scenario"));
  if (in.pv) out.input_digests["pv_file"] = sha256_hex(read_text(*in.pv, "pv profile"));
  if (in.load) out.input_digests["load_file"] = sha256_hex(read_text(*in.load, "load profile"));
  out.scenario = load_scenario_files(in.path, in.pv, in.load);
  out.digest = scenario_digest(out.scenario);
  out.input_digests["scenario"] = out.digest;
  return out;
}

RunManifest manifest_for(const std::string& sub, const ScenarioInput& in, const std::string& out,
                         const LoadedScenario& ls) {
  RunManifest m;
  m.subcommand = sub;
  m.scenario_path = in.path;
  m.output_dir = out;
  m.input_digests = ls.input_digests;
  if (in.pv) m.parameters["pv"] = *in.pv;
  if (in.load) m.parameters["load"] = *in.load;
  return m;
}

double cv_hours(const EmulationTrace& tr) {
  const auto n = std::count(tr.cv_limited.begin(), tr.cv_limited.end(), true);
  return static_cast<double>(n) * tr.dt_hours;
}

ElectricalBatteryModel pick_model(const Scenario& s, bool ideal,
                                  const std::optional<std::string>& model_path,
                                  RunManifest& m) {
  if (ideal && model_path) throw ValidationError("model", "--ideal and --model are exclusive");
  if (ideal) {
    m.parameters["plant"] = "ideal";
    return ElectricalBatteryModel::ideal(s.battery);
  }
  auto base = ElectricalBatteryModel::vrla(s.battery);
  if (!model_path) {
    m.parameters["plant"] = "vrla";
    return base;
  }
  const std::string text = read_text(*model_path, "model");
  m.parameters["plant"] = "vrla+overrides";
  m.parameters["model"] = *model_path;
  m.input_digests["model_file"] = sha256_hex(text);
  return model_from_json(text, base);
}

/// Maps library exceptions onto exit codes, printing one diagnostic line.
template <class F>
int guarded(F&& body, std::ostream& err = std::cerr) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    err << "error: infeasible (" << to_string(e.binding_class()) << "): " << e.what() << "\n";
    return kInfeasible;
  } catch (const ModelError& e) {
    err << "error: model: " << e.what() << "\n";
    return kModel;
  } catch (const ArtifactMismatchError& e) {
    err << "error: artifact mismatch: " << e.what() << "\n";
    return kMismatch;
  } catch (const ValidationError& e) {
    err << "error: invalid " << e.field() << ": " << e.what() << "\n";
    return kInput;
  } catch (const LengthMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kInternal;
  }
}

// ---- schedule -------------------------------------------------------------

struct ScheduleArgs {
  ScenarioInput in;
  std::string out;
};

int cmd_schedule(const ScheduleArgs& a) {
  const auto ls = load_input(a.in);
  const Schedule sch = solve_day_ahead(ls.scenario);
  auto m = manifest_for("schedule", a.in, a.out, ls);
  write_outputs(a.out, {{"schedule.csv", schedule_to_csv(sch)},
                        {"schedule.json", schedule_to_json(sch, ls.digest)},
                        {"manifest.json", m.to_json()}});
  std::cout << "planned_cost " << fmt(sch.planned_cost) << " EUR\n"
            << "final_soe " << fmt(sch.soe_plan.back()) << "\n";
  return kOk;
}

// ---- emulate --------------------------------------------------------------

struct EmulateArgs {
  ScenarioInput in;
  std::string schedule;
  std::string out;
  std::size_t substeps = 60;
  bool ideal = false;
  std::optional<std::string> model;
};

int cmd_emulate(const EmulateArgs& a) {
  const auto ls = load_input(a.in);
  const std::string sched_text = read_text(a.schedule, "schedule");
  auto m = manifest_for("emulate", a.in, a.out, ls);
  m.input_digests["schedule_file"] = sha256_hex(sched_text);
  m.parameters["schedule"] = a.schedule;
  m.parameters["substeps"] = std::to_string(a.substeps);

  const auto art = schedule_from_json(sched_text);
  if (art.scenario_digest != ls.digest) {
    throw ArtifactMismatchError("schedule was computed for scenario " + art.scenario_digest +
                                ", not " + ls.digest);
  }
  if (a.substeps == 0) throw ValidationError("substeps", "substeps must be at least 1");
  const auto model = pick_model(ls.scenario, a.ideal, a.model, m);
  const auto tr = emulate(ls.scenario, art.schedule, model, a.substeps);

  write_outputs(a.out, {{"trace.csv", trace_to_csv(tr)},
                        {"emulation.json", emulation_to_json(tr, model, ls.digest)},
                        {"manifest.json", m.to_json()}});
  std::cout << "cv_limited_hours " << fmt(cv_hours(tr)) << "\n"
            << "soe_est_final " << fmt(tr.boundary_soe_est.back()) << "\n"
            << "soc_est_final " << fmt(tr.boundary_soc_est.back()) << "\n"
            << "grid_violations " << tr.violations.size() << "\n";
  return kOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  ScenarioInput in;
  std::string schedule;
  std::string emulation;
  std::string out;
};

Outputs report_outputs(const Scenario& s, const Schedule& sch, const EmulationTrace& tr,
                       const std::string& digest, DiscrepancyReport& report) {
  report = compare(s, sch, tr);
  return {{"report.json", report_to_json(report, digest)},
          {"report.txt", format_report(report)},
          {"plot_power.csv", plot_power_csv(s, sch, tr)},
          {"plot_soe.csv", plot_soe_csv(s, sch, tr)}};
}

int cmd_compare(const CompareArgs& a) {
  const auto ls = load_input(a.in);
  const std::string sched_text = read_text(a.schedule, "schedule");
  const std::string emu_text = read_text(a.emulation, "emulation");
  auto m = manifest_for("compare", a.in, a.out, ls);
  m.input_digests["schedule_file"] = sha256_hex(sched_text);
  m.input_digests["emulation_file"] = sha256_hex(emu_text);
  m.parameters["schedule"] = a.schedule;
  m.parameters["emulation"] = a.emulation;

  const auto sched = schedule_from_json(sched_text);
  const auto emu = emulation_from_json(emu_text);
  if (sched.scenario_digest != emu.scenario_digest) {
    throw ArtifactMismatchError("schedule and emulation were produced for different scenarios");
  }
  if (sched.scenario_digest != ls.digest) {
    throw ArtifactMismatchError("artifacts do not belong to scenario " + a.in.path);
  }
  if (emu.trace.size() != sched.schedule.n_steps() * emu.trace.substeps_per_step) {
    throw ArtifactMismatchError("emulation trace length does not match the schedule");
  }

  DiscrepancyReport report;
  Outputs files = report_outputs(ls.scenario, sched.schedule, emu.trace, ls.digest, report);
  files.emplace_back("manifest.json", m.to_json());
  write_outputs(a.out, files);
  std::cout << format_report(report);
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::vector<std::string> scenarios;
  std::string out;
  std::size_t substeps = 60;
  bool ideal = false;
  unsigned jobs = 0;
};

struct SweepResult {
  int code = kOk;
  std::string message;
  std::string subdir;
  Outputs files;
  DiscrepancyReport report;
};

SweepResult sweep_one(const std::string& path, std::size_t index, const SweepArgs& a) {
  SweepResult r;
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%03zu-", index);
  r.subdir = prefix + fs::path(path).parent_path().filename().string();
  if (r.subdir.size() == 4) r.subdir += fs::path(path).stem().string();
  std::ostringstream err;
  r.code = guarded([&] {
    const ScenarioInput in{path, std::nullopt, std::nullopt};
    const auto ls = load_input(in);
    auto m = manifest_for("sweep", in, (fs::path(a.out) / r.subdir).string(), ls);
    m.parameters["substeps"] = std::to_string(a.substeps);
    const Schedule sch = solve_day_ahead(ls.scenario);
    const auto model = pick_model(ls.scenario, a.ideal, std::nullopt, m);
    const auto tr = emulate(ls.scenario, sch, model, a.substeps);
    r.files = {{"schedule.csv", schedule_to_csv(sch)},
               {"schedule.json", schedule_to_json(sch, ls.digest)},
               {"trace.csv", trace_to_csv(tr)},
               {"emulation.json", emulation_to_json(tr, model, ls.digest)}};
    auto rep = report_outputs(ls.scenario, sch, tr, ls.digest, r.report);
    r.files.insert(r.files.end(), rep.begin(), rep.end());
    r.files.emplace_back("manifest.json", m.to_json());
    return kOk;
  }, err);
  r.message = err.str();
  return r;
}

int cmd_sweep(const SweepArgs& a) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = a.jobs ? a.jobs : hw;
  std::vector<SweepResult> results(a.scenarios.size());
  // Workers share nothing but the read-only arguments; results land in fixed slots so
  // the output does not depend on scheduling.
  for (std::size_t begin = 0; begin < a.scenarios.size(); begin += jobs) {
    const std::size_t end = std::min(a.scenarios.size(), begin + jobs);
    std::vector<std::future<SweepResult>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, sweep_one, a.scenarios[i], i, std::cref(a)));
    }
    for (std::size_t i = begin; i < end; ++i) results[i] = batch[i - begin].get();
  }

  std::string summary = "index,scenario,status,planned_cost,realized_cost,cost_error_pct,"
                        "cv_limited_hours,soe_deviation_pct\n";
  int worst = kOk;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    summary += std::to_string(i) + "," + a.scenarios[i] + ",";
    if (r.code != kOk) {
      std::cerr << a.scenarios[i] << ": " << r.message;
      summary += "exit_" + std::to_string(r.code) + ",,,,,\n";
      if (worst == kOk) worst = r.code;
      continue;
    }
    const auto& rep = r.report;
    summary += "ok," + fmt(rep.planned_cost, "%.17g") + "," + fmt(rep.realized_cost, "%.17g") +
               "," + (rep.cost_error_pct ? fmt(*rep.cost_error_pct, "%.17g") : "undefined") +
               "," + fmt(rep.cv_limited_hours, "%.17g") + "," +
               fmt(rep.soe_deviation_pct, "%.17g") + "\n";
  }
  for (const auto& r : results) {
    if (r.code == kOk) write_outputs(fs::path(a.out) / r.subdir, r.files);
  }
  write_outputs(a.out, {{"sweep.csv", summary}});
  std::cout << summary;
  return worst;
}

// ---- preset ---------------------------------------------------------------

int cmd_preset(const std::string& name, const std::string& out) {
  const auto s = presets::by_name(name);
  if (!s) {
    std::string known;
    for (auto n : presets::names()) known += " " + std::string(n);
    throw ValidationError("preset", "unknown preset '" + name + "'; known:" + known);
  }
  const auto text = serialize_scenario(*s);
  write_outputs(out, {{"scenario.json", text.config},
                      {"pv.csv", text.pv_csv},
                      {"load.csv", text.load_csv}});
  std::cout << "wrote " << (fs::path(out) / "scenario.json").string() << "\n";
  return kOk;
}

void add_scenario_options(CLI::App* cmd, ScenarioInput& in) {
  cmd->add_option("--scenario", in.path, "Scenario config (JSON)")->required();
  cmd->add_option("--pv", in.pv, "PV profile CSV (overrides the config's path)");
  cmd->add_option("--load", in.load, "Load profile CSV (overrides the config's path)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead microgrid scheduling and plant replay"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  ScheduleArgs sa;
  auto* sched = app.add_subcommand("schedule", "Solve the day-ahead schedule");
  add_scenario_options(sched, sa.in);
  sched->add_option("--out", sa.out, "Output directory")->required();

  EmulateArgs ea;
  auto* emu = app.add_subcommand("emulate", "Replay a schedule on the battery plant model");
  add_scenario_options(emu, ea.in);
  emu->add_option("--schedule", ea.schedule, "schedule.json from `schedule`")->required();
  emu->add_option("--out", ea.out, "Output directory")->required();
  emu->add_option("--substeps", ea.substeps, "Sub-steps per schedule step")
      ->capture_default_str();
  emu->add_flag("--ideal", ea.ideal, "Use the lossless plant instead of the VRLA model");
  emu->add_option("--model", ea.model, "JSON file overriding electrical model fields");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Compare planned and realized operation");
  add_scenario_options(cmp, ca.in);
  cmp->add_option("--schedule", ca.schedule, "schedule.json")->required();
  cmp->add_option("--emulation", ca.emulation, "emulation.json")->required();
  cmp->add_option("--out", ca.out, "Output directory")->required();

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Run schedule, emulate and compare on many scenarios");
  sweep->add_option("scenarios", wa.scenarios, "Scenario configs")->required();
  sweep->add_option("--out", wa.out, "Output directory")->required();
  sweep->add_option("--substeps", wa.substeps, "Sub-steps per schedule step")
      ->capture_default_str();
  sweep->add_flag("--ideal", wa.ideal, "Use the lossless plant");
  sweep->add_option("--jobs,-j", wa.jobs, "Parallel workers (default: hardware threads)");

  std::string preset_name;
  std::string preset_out;
  auto* preset = app.add_subcommand("preset", "Write a built-in scenario to files");
  preset->add_option("name", preset_name, "s1 | demo-day")->required();
  preset->add_option("--out", preset_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  if (*sched) return guarded([&] { return cmd_schedule(sa); });
  if (*emu) return guarded([&] { return cmd_emulate(ea); });
  if (*cmp) return guarded([&] { return cmd_compare(ca); });
  if (*sweep) return guarded([&] { return cmd_sweep(wa); });
  if (*preset) return guarded([&] { return cmd_preset(preset_name, preset_out); });
  return kInternal;
}
