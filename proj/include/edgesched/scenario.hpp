#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgesched/model.hpp"

// Randomized instance generation: distribution specs, server class profiles
// and the scenario configurations mirroring the paper-scale and testbed-scale
// setups.

namespace edgesched {

class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

enum class DistKind { NormalTruncated, Uniform, Constant };

// A scalar sampling spec. normal_truncated draws a normal variate and clamps
// it into [lo, hi]; uniform draws from [lo, hi); constant consumes no
// randomness.
struct DistributionSpec {
  DistKind kind = DistKind::Constant;
  double mean = 0.0;
  double stddev = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;

  static DistributionSpec constant(double value);
  static DistributionSpec uniform(double lo, double hi);
  static DistributionSpec normal_truncated(double mean, double stddev,
                                           double lo, double hi);

  double draw(std::mt19937_64& rng) const;
  double min_value() const;
  double max_value() const;
};

struct ServerClassProfile {
  std::string name;
  int count = 0;  // servers of this class in the topology
  DistributionSpec proc_delay_spec;
  double compute_capacity = 0.0;
  double comm_capacity = 0.0;
  int placement_slots = 0;  // max hosted (service, model) pairs
};

struct ScenarioConfig {
  std::string name;
  Mode mode = Mode::Strict;
  int n_requests = 1;
  int n_services = 1;  // |K|
  int n_models = 1;    // |L|
  std::vector<ServerClassProfile> edge_classes;
  ServerClassProfile cloud;  // count may be 0; hosts the whole catalog

  DistributionSpec accuracy_spec;        // A_i
  DistributionSpec delay_spec;           // C_i
  DistributionSpec queue_delay_spec;     // T_q
  DistributionSpec payload_spec;         // bytes
  DistributionSpec model_accuracy_spec;  // per (k, l), sorted ascending in l
  DistributionSpec compute_cost_spec = DistributionSpec::constant(1.0);
  DistributionSpec comm_cost_spec = DistributionSpec::constant(1.0);

  double weight_accuracy = 1.0;
  double weight_time = 1.0;
  double max_accuracy = 1.0;       // Max_as
  double max_completion_ms = 1.0;  // Max_cs
  double bandwidth_bytes_per_ms = 0.0;
  double drop_penalty = 0.0;

  // Model indices edge servers may host; empty means all. The cloud always
  // hosts everything.
  std::vector<int> edge_hosted_models;

  int n_edge_servers() const;
  int n_cloud_servers() const { return cloud.count; }
  int n_servers() const { return n_edge_servers() + cloud.count; }
};

// Throws InvalidConfigError with the offending field on the first violation.
void validate_config(const ScenarioConfig& config);

// Deterministically expands (config, seed) into a full instance: catalog
// draws, per-class processing delays, slot-limited service placement,
// uniformly assigned covering servers and per-request thresholds. The result
// always passes validate_instance.
ProblemInstance generate_instance(const ScenarioConfig& config,
                                  std::uint64_t seed);

// Catalog, servers and links only, drawn exactly as generate_instance draws
// them for the same seed; the request list is left empty. Used by the framed
// simulator, which creates requests from its own arrival process.
ProblemInstance generate_system_instance(const ScenarioConfig& config,
                                         std::uint64_t seed);

// One request with thresholds, weights, queue delay and payload drawn from
// the config's specs, covered by a uniformly chosen server from `edge_ids`.
Request draw_request(const ScenarioConfig& config, std::mt19937_64& rng,
                     int id, std::span<const int> edge_ids);

// The paper-scale numerical setup: 9 heterogeneous edge servers plus one
// cloud, |N|=100, |K|=100, |L|=10, N(0.45, 0.10) accuracy thresholds,
// uniform [0, 50] ms queue delays, 950-1300 ms edge / 300 ms cloud
// processing delays, 600 bytes/ms links, Max_as = 1, Max_cs = 12000 ms.
ScenarioConfig paper_default_profile();

// The two-edge testbed setup: constant thresholds C_i = 53000 ms and
// A_i = 0.5, gamma_edge = 3, eta_edge = 10, a low-accuracy edge model and a
// high-accuracy cloud-only model per service, 600 bytes/ms links.
ScenarioConfig testbed_profile();

// Tiny instances sized for the exact solver and the exhaustive oracle.
ScenarioConfig small_profile();

std::optional<ScenarioConfig> builtin_config(std::string_view name);

}  // namespace edgesched
