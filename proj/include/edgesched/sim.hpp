#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgesched/scenario.hpp"
#include "edgesched/schedulers.hpp"

// Monte-Carlo experiment harness: per-run metric aggregation, parameter
// sweeps, the adaptive bandwidth estimator, and the time-framed queue
// simulation.

namespace edgesched {

enum class Algorithm {
  Gus,
  Random,
  OffloadAll,
  LocalAll,
  HappyComp,
  HappyComm,
  Exact,
  BruteForce,
};

std::string algorithm_name(Algorithm algorithm);
std::optional<Algorithm> algorithm_from_name(std::string_view name);
std::vector<Algorithm> parse_algorithm_list(std::string_view csv);

struct RunResult {
  int run = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  int n_requests = 0;
  double satisfied_pct = 0.0;  // fractions in [0, 1]
  double mean_us = 0.0;        // Eq. (2) objective of the run
  double dropped_pct = 0.0;
  double local_pct = 0.0;
  double offload_cloud_pct = 0.0;
  double offload_edge_pct = 0.0;
};

// Runs one scheduler; `seed` feeds the randomized algorithms only.
Schedule run_algorithm(const ProblemInstance& instance, Algorithm algorithm,
                       std::uint64_t seed, const ExactLimits& limits = {});

RunResult evaluate_schedule(const ProblemInstance& instance,
                            const Schedule& schedule, int run,
                            std::string algorithm, std::uint64_t seed);

// Generates `runs` instances from derive_seed(base_seed, run) and evaluates
// every algorithm on each. Results are ordered by (run, algorithm) no matter
// how many worker threads execute the runs; threads <= 0 picks the hardware
// concurrency.
std::vector<RunResult> monte_carlo(const ScenarioConfig& config,
                                   const std::vector<Algorithm>& algorithms,
                                   int runs, std::uint64_t base_seed,
                                   int threads = 1);

enum class SweepParameter {
  RequestedDelayMean,
  RequestedAccuracyMean,
  NumRequests,
  QueueDelayMax,
};

std::string sweep_parameter_name(SweepParameter parameter);
std::optional<SweepParameter> sweep_parameter_from_name(std::string_view name);

// Overrides one scenario parameter; throws InvalidConfigError when the
// parameter cannot be applied to the configured distribution kind.
void apply_sweep_value(ScenarioConfig& config, SweepParameter parameter,
                       double value);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::RequestedDelayMean;
  std::vector<double> values;  // strictly monotone
  int runs_per_point = 1;
  std::vector<Algorithm> algorithms;
};

struct SweepPoint {
  double value = 0.0;
  std::string algorithm;
  int runs = 0;
  double satisfied_mean = 0.0;
  double satisfied_se = 0.0;  // standard error of the mean
  double mean_us_mean = 0.0;
  double mean_us_se = 0.0;
  double dropped_mean = 0.0;
  double local_mean = 0.0;
  double offload_cloud_mean = 0.0;
  double offload_edge_mean = 0.0;
};

std::vector<SweepPoint> sweep(const SweepSpec& spec,
                              const ScenarioConfig& base_config,
                              std::uint64_t base_seed, int threads = 1);

// Two most recent bandwidth measurements; the working estimate is their
// mean, matching the testbed update rule.
class BandwidthEstimator {
 public:
  BandwidthEstimator(double current, double previous);

  double current() const { return current_; }
  double previous() const { return previous_; }
  double estimate_bytes_per_ms() const { return 0.5 * (current_ + previous_); }

  // Shifts the observation in: previous <- current, current <- observed.
  BandwidthEstimator updated(double observed_bytes_per_ms) const;

 private:
  double current_;
  double previous_;
};

BandwidthEstimator update_bandwidth(const BandwidthEstimator& estimator,
                                    double observed_bytes_per_ms);

struct FramedParams {
  int frames = 1;
  double frame_len_ms = 3000.0;
  int queue_cap = 4;
  double arrival_rate_per_s = 1.0;  // per edge server
  double bandwidth_noise_sigma = 0.2;
};

struct FramedOutput {
  // One row per (frame, algorithm); RunResult::run holds the frame index.
  std::vector<RunResult> per_frame;
  // One row per algorithm over all arrivals; run is -1.
  std::vector<RunResult> aggregate;
};

// Time-framed simulation: Poisson arrivals per edge server feed capacity-
// bounded admission queues; a batch is scheduled whenever a queue fills or a
// frame ends, with T_q equal to the realized wait. Capacities reset each
// frame and communication delays follow the bandwidth estimator, updated
// per frame from noisy observations. All algorithms see identical arrivals.
FramedOutput framed_simulation(const ScenarioConfig& config,
                               const FramedParams& params,
                               const std::vector<Algorithm>& algorithms,
                               std::uint64_t seed);

}  // namespace edgesched
