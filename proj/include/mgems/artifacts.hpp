#pragma once

#include <map>
#include <string>
#include <string_view>

#include "mgems/analysis.hpp"
#include "mgems/emulator.hpp"
#include "mgems/lp_model.hpp"
#include "mgems/scenario.hpp"

namespace mgems {

inline constexpr int kArtifactSchemaVersion = 1;

std::string tool_version();

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Digest of the canonical serialization, independent of file names and formatting.
std::string scenario_digest(const Scenario& scenario);

// Schedule: CSV for plotting, JSON as the round-trippable artifact.
std::string schedule_to_csv(const Schedule& schedule);
std::string schedule_to_json(const Schedule& schedule, const std::string& scenario_digest);

struct ScheduleArtifact {
  Schedule schedule;
  std::string scenario_digest;
};
/// Throws ParseError on malformed input and ArtifactMismatchError on schema mismatch.
ScheduleArtifact schedule_from_json(std::string_view text);

// Emulation: per-sub-step CSV plus a JSON document carrying the summary and full trace.
std::string trace_to_csv(const EmulationTrace& trace);
std::string emulation_to_json(const EmulationTrace& trace, const ElectricalBatteryModel& model,
                              const std::string& scenario_digest);

struct EmulationArtifact {
  EmulationTrace trace;
  ElectricalBatteryModel model;
  std::string scenario_digest;
};
EmulationArtifact emulation_from_json(std::string_view text);

/// Electrical model overrides from a JSON object; unspecified fields keep `base` values.
ElectricalBatteryModel model_from_json(std::string_view text, ElectricalBatteryModel base);

std::string report_to_json(const DiscrepancyReport& report, const std::string& scenario_digest);

/// Per-sub-step planned vs realized powers.
std::string plot_power_csv(const Scenario& scenario, const Schedule& schedule,
                           const EmulationTrace& trace);
/// Per-sub-step SoE plan, SoE/SoC estimates and the SoE/SoC limit lines.
std::string plot_soe_csv(const Scenario& scenario, const Schedule& schedule,
                         const EmulationTrace& trace);

/// Inputs and parameters of one CLI invocation. Contains no timestamps so identical
/// invocations produce identical manifests.
struct RunManifest {
  std::string subcommand;
  std::string scenario_path;
  std::string output_dir;
  std::map<std::string, std::string> parameters;
  std::map<std::string, std::string> input_digests;
  std::string tool_version = mgems::tool_version();

  std::string to_json() const;
};

}  // namespace mgems
