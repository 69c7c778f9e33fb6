#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "edgesched/scenario.hpp"
#include "edgesched/schedule.hpp"
#include "edgesched/sim.hpp"

// Result/config serialization: the CSV result format, the JSON scenario
// config format (versioned, unknown fields rejected) and saved schedules.

namespace edgesched {

// CSV with header run,algorithm,n_requests,satisfied_pct,mean_us,dropped_pct,
// local_pct,offload_cloud_pct,offload_edge_pct; floats at 6 decimal places,
// rows sorted by (run, algorithm), trailing newline.
std::string results_to_csv(std::vector<RunResult> results);
void write_results(const std::vector<RunResult>& results,
                   const std::string& path);
std::vector<RunResult> parse_results_csv(const std::string& text);

// Tidy sweep table, one row per (value, algorithm).
std::string sweep_to_csv(const std::vector<SweepPoint>& points,
                         SweepParameter parameter);

nlohmann::json config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const nlohmann::json& json);
std::string config_to_string(const ScenarioConfig& config);
ScenarioConfig parse_config_string(const std::string& text);

// Resolves a builtin profile name or reads a JSON config file.
ScenarioConfig load_config(const std::string& path_or_name);

struct SavedSchedule {
  ScenarioConfig config;  // scenario that generated the instance
  std::uint64_t seed = 0;
  std::string algorithm;
  Schedule schedule;
};

std::string schedule_to_string(const SavedSchedule& saved);
SavedSchedule parse_schedule_string(const std::string& text);

// Canonical JSON image of an instance; used to compare instances for
// byte-identical equality in tests.
nlohmann::json instance_to_json(const ProblemInstance& instance);

}  // namespace edgesched
