#pragma once

#include <string>
#include <vector>

#include "polelift/metrics.hpp"
#include "polelift/mission.hpp"
#include "polelift/run_log.hpp"
#include "polelift/scenario.hpp"

namespace polelift {

enum class RunStatus { Success, Aborted, Diverged };

// Process exit code for a finished run: 0, 2 or 3.
int exit_code(RunStatus s);
std::string to_string(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::Success;
  std::string message;
  double end_time = 0.0;
  std::string config_hash;
  std::vector<LogRow> log;
  MetricsRecorder metrics;
  std::vector<PlacementRecord> placements;
  std::vector<MissionEvent> events;
  std::vector<std::string> phase_sequence;
  // Cross-module contract counters, sampled at every controller tick.
  int model_mismatch_ticks = 0;    // payload attached state != controller model
  int unfrozen_gripper_ticks = 0;  // Grasp/Release tick with the integral running
  double max_slack_norm = 0.0;
};

// Simulates the scenario to completion. Deterministic for (config, seed).
RunResult run_scenario(const ScenarioConfig& config);

// Versioned JSON summary; byte-identical for identical results.
std::string summary_json(const ScenarioConfig& config, const RunResult& result);

// Writes log.csv and summary.json into dir (created if missing).
void write_outputs(const ScenarioConfig& config, const RunResult& result, const std::string& dir);

}  // namespace polelift
