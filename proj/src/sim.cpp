#include "edgesched/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "edgesched/rng.hpp"

namespace edgesched {

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Gus:
      return "gus";
    case Algorithm::Random:
      return "random";
    case Algorithm::OffloadAll:
      return "offload-all";
    case Algorithm::LocalAll:
      return "local-all";
    case Algorithm::HappyComp:
      return "happy-comp";
    case Algorithm::HappyComm:
      return "happy-comm";
    case Algorithm::Exact:
      return "exact";
    case Algorithm::BruteForce:
      return "brute-force";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
  if (name == "gus") return Algorithm::Gus;
  if (name == "random") return Algorithm::Random;
  if (name == "offload-all") return Algorithm::OffloadAll;
  if (name == "local-all") return Algorithm::LocalAll;
  if (name == "happy-comp") return Algorithm::HappyComp;
  if (name == "happy-comm") return Algorithm::HappyComm;
  if (name == "exact") return Algorithm::Exact;
  if (name == "brute-force") return Algorithm::BruteForce;
  return std::nullopt;
}

std::vector<Algorithm> parse_algorithm_list(std::string_view csv) {
  std::vector<Algorithm> algorithms;
  std::string token;
  std::istringstream stream{std::string(csv)};
  while (std::getline(stream, token, ',')) {
    if (token.empty()) {
      continue;
    }
    auto algorithm = algorithm_from_name(token);
    if (!algorithm) {
      throw Error("unknown algorithm name: " + token);
    }
    algorithms.push_back(*algorithm);
  }
  if (algorithms.empty()) {
    throw Error("algorithm list is empty");
  }
  return algorithms;
}

Schedule run_algorithm(const ProblemInstance& instance, Algorithm algorithm,
                       std::uint64_t seed, const ExactLimits& limits) {
  switch (algorithm) {
    case Algorithm::Gus:
      return gus(instance);
    case Algorithm::Random:
      return random_assignment(instance, seed);
    case Algorithm::OffloadAll:
      return offload_all(instance);
    case Algorithm::LocalAll:
      return local_all(instance);
    case Algorithm::HappyComp:
      return happy_computation(instance);
    case Algorithm::HappyComm:
      return happy_communication(instance);
    case Algorithm::Exact:
      return exact_solve(instance, limits).schedule;
    case Algorithm::BruteForce:
      return brute_force(instance);
  }
  throw Error("unknown algorithm");
}

RunResult evaluate_schedule(const ProblemInstance& instance,
                            const Schedule& schedule, int run,
                            std::string algorithm, std::uint64_t seed) {
  RunResult result;
  result.run = run;
  result.algorithm = std::move(algorithm);
  result.seed = seed;
  result.n_requests = instance.num_requests();
  result.mean_us = schedule.objective;
  if (instance.num_requests() == 0) {
    return result;
  }
  int local = 0;
  int offload_edge = 0;
  int offload_cloud = 0;
  int dropped = 0;
  for (const Assignment& assignment : schedule.assignments) {
    switch (assignment.decision) {
      case Decision::Local:
        ++local;
        break;
      case Decision::OffloadEdge:
        ++offload_edge;
        break;
      case Decision::OffloadCloud:
        ++offload_cloud;
        break;
      case Decision::Drop:
        ++dropped;
        break;
    }
  }
  const double n = instance.num_requests();
  result.satisfied_pct = schedule.satisfied_count / n;
  result.dropped_pct = dropped / n;
  result.local_pct = local / n;
  result.offload_cloud_pct = offload_cloud / n;
  result.offload_edge_pct = offload_edge / n;
  return result;
}

namespace {

int resolve_threads(int threads, int runs) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::clamp(threads, 1, std::max(1, runs));
}

}  // namespace

std::vector<RunResult> monte_carlo(const ScenarioConfig& config,
                                   const std::vector<Algorithm>& algorithms,
                                   int runs, std::uint64_t base_seed,
                                   int threads) {
  if (runs < 1) {
    throw InvalidConfigError("monte_carlo requires runs >= 1");
  }
  if (algorithms.empty()) {
    throw InvalidConfigError("monte_carlo requires at least one algorithm");
  }
  validate_config(config);

  const std::size_t per_run = algorithms.size();
  std::vector<RunResult> results(static_cast<std::size_t>(runs) * per_run);

  std::atomic<int> next_run{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const int run = next_run.fetch_add(1);
      if (run >= runs) {
        return;
      }
      try {
        const std::uint64_t run_seed = derive_seed(base_seed, static_cast<std::uint64_t>(run));
        const ProblemInstance instance = generate_instance(config, run_seed);
        for (std::size_t a = 0; a < per_run; ++a) {
          const std::uint64_t algo_seed = derive_seed(run_seed, 1000 + a);
          const Schedule schedule =
              run_algorithm(instance, algorithms[a], algo_seed);
          results[static_cast<std::size_t>(run) * per_run + a] =
              evaluate_schedule(instance, schedule, run,
                                algorithm_name(algorithms[a]), run_seed);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
        next_run.store(runs);
        return;
      }
    }
  };

  const int thread_count = resolve_threads(threads, runs);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
      pool.emplace_back(worker);
    }
    for (std::thread& thread : pool) {
      thread.join();
    }
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
  return results;
}

std::string sweep_parameter_name(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::RequestedDelayMean:
      return "requested_delay_mean";
    case SweepParameter::RequestedAccuracyMean:
      return "requested_accuracy_mean";
    case SweepParameter::NumRequests:
      return "n_requests";
    case SweepParameter::QueueDelayMax:
      return "queue_delay_max";
  }
  return "unknown";
}

std::optional<SweepParameter> sweep_parameter_from_name(
    std::string_view name) {
  if (name == "requested_delay_mean") return SweepParameter::RequestedDelayMean;
  if (name == "requested_accuracy_mean")
    return SweepParameter::RequestedAccuracyMean;
  if (name == "n_requests") return SweepParameter::NumRequests;
  if (name == "queue_delay_max") return SweepParameter::QueueDelayMax;
  return std::nullopt;
}

namespace {

void set_center(DistributionSpec& spec, double value,
                const std::string& field) {
  switch (spec.kind) {
    case DistKind::NormalTruncated:
      spec.mean = value;
      return;
    case DistKind::Constant:
      spec.value = value;
      return;
    case DistKind::Uniform:
      throw InvalidConfigError(field +
                               ": cannot sweep the mean of a uniform spec");
  }
}

}  // namespace

void apply_sweep_value(ScenarioConfig& config, SweepParameter parameter,
                       double value) {
  switch (parameter) {
    case SweepParameter::RequestedDelayMean:
      set_center(config.delay_spec, value, "delay_spec");
      return;
    case SweepParameter::RequestedAccuracyMean:
      set_center(config.accuracy_spec, value, "accuracy_spec");
      return;
    case SweepParameter::NumRequests: {
      const int n = static_cast<int>(std::llround(value));
      if (n < 1 || std::abs(value - n) > 1e-9) {
        throw InvalidConfigError("n_requests sweep values must be integers >= 1");
      }
      config.n_requests = n;
      return;
    }
    case SweepParameter::QueueDelayMax:
      switch (config.queue_delay_spec.kind) {
        case DistKind::Uniform:
          config.queue_delay_spec.hi = value;
          if (config.queue_delay_spec.lo > value) {
            config.queue_delay_spec.lo = value;
          }
          return;
        case DistKind::Constant:
          config.queue_delay_spec.value = value;
          return;
        case DistKind::NormalTruncated:
          config.queue_delay_spec.hi = value;
          return;
      }
      return;
  }
  throw InvalidConfigError("unknown sweep parameter");
}

namespace {

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  int count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return count == 0 ? 0.0 : sum / count; }
  double standard_error() const {
    if (count < 2) {
      return 0.0;
    }
    const double m = mean();
    const double variance =
        std::max(0.0, (sum_sq - count * m * m) / (count - 1));
    return std::sqrt(variance / count);
  }
};

}  // namespace

std::vector<SweepPoint> sweep(const SweepSpec& spec,
                              const ScenarioConfig& base_config,
                              std::uint64_t base_seed, int threads) {
  if (spec.values.empty()) {
    throw InvalidConfigError("sweep requires at least one value");
  }
  if (spec.runs_per_point < 1) {
    throw InvalidConfigError("sweep requires runs_per_point >= 1");
  }
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (spec.values[i] <= spec.values[i - 1]) {
      throw InvalidConfigError("sweep values must be strictly increasing");
    }
  }
  if (spec.algorithms.empty()) {
    throw InvalidConfigError("sweep requires at least one algorithm");
  }

  std::vector<SweepPoint> points;
  for (double value : spec.values) {
    ScenarioConfig config = base_config;
    apply_sweep_value(config, spec.parameter, value);
    const std::vector<RunResult> results = monte_carlo(
        config, spec.algorithms, spec.runs_per_point, base_seed, threads);

    for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
      MeanAccumulator satisfied;
      MeanAccumulator mean_us;
      MeanAccumulator dropped;
      MeanAccumulator local;
      MeanAccumulator offload_cloud;
      MeanAccumulator offload_edge;
      for (int run = 0; run < spec.runs_per_point; ++run) {
        const RunResult& r =
            results[static_cast<std::size_t>(run) * spec.algorithms.size() + a];
        satisfied.add(r.satisfied_pct);
        mean_us.add(r.mean_us);
        dropped.add(r.dropped_pct);
        local.add(r.local_pct);
        offload_cloud.add(r.offload_cloud_pct);
        offload_edge.add(r.offload_edge_pct);
      }
      SweepPoint point;
      point.value = value;
      point.algorithm = algorithm_name(spec.algorithms[a]);
      point.runs = spec.runs_per_point;
      point.satisfied_mean = satisfied.mean();
      point.satisfied_se = satisfied.standard_error();
      point.mean_us_mean = mean_us.mean();
      point.mean_us_se = mean_us.standard_error();
      point.dropped_mean = dropped.mean();
      point.local_mean = local.mean();
      point.offload_cloud_mean = offload_cloud.mean();
      point.offload_edge_mean = offload_edge.mean();
      points.push_back(std::move(point));
    }
  }
  return points;
}

BandwidthEstimator::BandwidthEstimator(double current, double previous)
    : current_(current), previous_(previous) {
  if (!(current > 0.0) || !(previous > 0.0)) {
    throw Error("bandwidth estimates must be positive");
  }
}

BandwidthEstimator BandwidthEstimator::updated(
    double observed_bytes_per_ms) const {
  if (!(observed_bytes_per_ms > 0.0)) {
    throw Error("bandwidth observation must be positive");
  }
  return BandwidthEstimator(observed_bytes_per_ms, current_);
}

BandwidthEstimator update_bandwidth(const BandwidthEstimator& estimator,
                                    double observed_bytes_per_ms) {
  return estimator.updated(observed_bytes_per_ms);
}

namespace {

struct ArrivalEvent {
  double time_ms = 0.0;
  int edge = 0;
  Request request;  // queue_delay_ms is set when the batch fires
};

struct FrameCounters {
  int arrivals = 0;
  int satisfied = 0;
  int local = 0;
  int offload_edge = 0;
  int offload_cloud = 0;
  int dropped = 0;
  double objective_sum = 0.0;

  void absorb(const FrameCounters& other) {
    arrivals += other.arrivals;
    satisfied += other.satisfied;
    local += other.local;
    offload_edge += other.offload_edge;
    offload_cloud += other.offload_cloud;
    dropped += other.dropped;
    objective_sum += other.objective_sum;
  }
};

RunResult counters_to_result(const FrameCounters& counters, int run,
                             std::string algorithm, std::uint64_t seed) {
  RunResult result;
  result.run = run;
  result.algorithm = std::move(algorithm);
  result.seed = seed;
  result.n_requests = counters.arrivals;
  if (counters.arrivals > 0) {
    const double n = counters.arrivals;
    result.satisfied_pct = counters.satisfied / n;
    result.mean_us = counters.objective_sum / n;
    result.dropped_pct = counters.dropped / n;
    result.local_pct = counters.local / n;
    result.offload_cloud_pct = counters.offload_cloud / n;
    result.offload_edge_pct = counters.offload_edge / n;
  }
  return result;
}

}  // namespace

FramedOutput framed_simulation(const ScenarioConfig& config,
                               const FramedParams& params,
                               const std::vector<Algorithm>& algorithms,
                               std::uint64_t seed) {
  if (params.frames < 1 || !(params.frame_len_ms > 0.0)) {
    throw InvalidConfigError("framed_simulation requires frames >= 1 and a positive frame length");
  }
  if (params.queue_cap < 1) {
    throw InvalidConfigError("framed_simulation requires queue_cap >= 1");
  }
  if (params.arrival_rate_per_s < 0.0) {
    throw InvalidConfigError("arrival rate must be >= 0");
  }
  if (algorithms.empty()) {
    throw InvalidConfigError("framed_simulation requires at least one algorithm");
  }

  const ProblemInstance system =
      generate_system_instance(config, derive_seed(seed, 1));
  std::vector<int> edge_ids;
  for (const Server& server : system.servers) {
    if (server.kind == ServerKind::Edge) {
      edge_ids.push_back(server.id);
    }
  }

  // Arrival stream and bandwidth observations are independent of the
  // algorithm under test, so every algorithm replays identical frames.
  const double horizon_ms = params.frames * params.frame_len_ms;
  std::vector<ArrivalEvent> arrivals;
  {
    std::mt19937_64 rng(derive_seed(seed, 2));
    const double rate_per_ms = params.arrival_rate_per_s / 1000.0;
    for (int edge : edge_ids) {
      if (rate_per_ms <= 0.0) {
        break;
      }
      std::exponential_distribution<double> gap(rate_per_ms);
      const int covering[] = {edge};
      double t = gap(rng);
      while (t < horizon_ms) {
        ArrivalEvent event;
        event.time_ms = t;
        event.edge = edge;
        event.request = draw_request(config, rng, 0, covering);
        arrivals.push_back(std::move(event));
        t += gap(rng);
      }
    }
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const ArrivalEvent& a, const ArrivalEvent& b) {
                       if (a.time_ms != b.time_ms) {
                         return a.time_ms < b.time_ms;
                       }
                       return a.edge < b.edge;
                     });
  }

  std::vector<double> observations(static_cast<std::size_t>(params.frames));
  {
    std::mt19937_64 rng(derive_seed(seed, 3));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (double& obs : observations) {
      obs = config.bandwidth_bytes_per_ms *
            std::exp(params.bandwidth_noise_sigma * noise(rng));
    }
  }

  FramedOutput output;
  if (arrivals.empty()) {
    return output;
  }

  // Worst-case processing delay over all classes, for the Max_cs adaptation.
  double proc_max = config.cloud.proc_delay_spec.max_value();
  for (const ServerClassProfile& profile : config.edge_classes) {
    proc_max = std::max(proc_max, profile.proc_delay_spec.max_value());
  }
  const double payload_max = config.payload_spec.max_value();

  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    const Algorithm algorithm = algorithms[a];
    const std::uint64_t algo_seed = derive_seed(seed, 100 + a);

    std::vector<double> remaining_compute;
    std::vector<double> remaining_comm;
    std::vector<std::vector<ArrivalEvent>> queues(system.servers.size());
    std::vector<FrameCounters> frames(static_cast<std::size_t>(params.frames));
    std::size_t next_arrival = 0;
    std::uint64_t batch_counter = 0;
    BandwidthEstimator estimator(config.bandwidth_bytes_per_ms,
                                 config.bandwidth_bytes_per_ms);

    auto reset_capacities = [&]() {
      remaining_compute.clear();
      remaining_comm.clear();
      for (const Server& server : system.servers) {
        remaining_compute.push_back(server.compute_capacity);
        remaining_comm.push_back(server.comm_capacity);
      }
    };
    reset_capacities();

    double frame_bandwidth = estimator.estimate_bytes_per_ms();
    double frame_max_cs =
        std::max(config.max_completion_ms,
                 payload_max / frame_bandwidth + params.frame_len_ms + proc_max);

    auto fire_batch = [&](int edge, double fire_time_ms, FrameCounters& frame) {
      std::vector<ArrivalEvent>& queue = queues[static_cast<std::size_t>(edge)];
      if (queue.empty()) {
        return;
      }
      ProblemInstance batch;
      batch.catalog = system.catalog;
      batch.servers = system.servers;
      batch.delays = DelayTable(system.num_servers());
      batch.delays.fill_bandwidth(frame_bandwidth);
      batch.max_accuracy = system.max_accuracy;
      batch.max_completion_ms = frame_max_cs;
      batch.mode = system.mode;
      batch.drop_penalty = system.drop_penalty;
      for (std::size_t j = 0; j < batch.servers.size(); ++j) {
        batch.servers[j].compute_capacity = remaining_compute[j];
        batch.servers[j].comm_capacity = remaining_comm[j];
      }
      batch.requests.reserve(queue.size());
      for (std::size_t i = 0; i < queue.size(); ++i) {
        Request request = queue[i].request;
        request.id = static_cast<int>(i);
        request.queue_delay_ms = fire_time_ms - queue[i].time_ms;
        batch.requests.push_back(std::move(request));
      }
      queue.clear();

      const Schedule schedule = run_algorithm(
          batch, algorithm, derive_seed(algo_seed, batch_counter++));
      frame.arrivals += batch.num_requests();
      for (const Assignment& assignment : schedule.assignments) {
        const Request& request =
            batch.requests[static_cast<std::size_t>(assignment.request)];
        if (assignment.decision == Decision::Drop) {
          ++frame.dropped;
          frame.objective_sum -= batch.drop_penalty;
          continue;
        }
        frame.objective_sum += assignment.us;
        if (is_satisfied(batch, assignment)) {
          ++frame.satisfied;
        }
        switch (assignment.decision) {
          case Decision::Local:
            ++frame.local;
            break;
          case Decision::OffloadEdge:
            ++frame.offload_edge;
            break;
          case Decision::OffloadCloud:
            ++frame.offload_cloud;
            break;
          case Decision::Drop:
            break;
        }
        remaining_compute[static_cast<std::size_t>(assignment.server)] -=
            batch.catalog.compute_cost(request.service, assignment.model);
        if (assignment.server != request.covering_server) {
          remaining_comm[static_cast<std::size_t>(request.covering_server)] -=
              batch.catalog.comm_cost(request.service, assignment.model);
        }
      }
    };

    for (int f = 0; f < params.frames; ++f) {
      FrameCounters& frame = frames[static_cast<std::size_t>(f)];
      const double frame_end = (f + 1) * params.frame_len_ms;
      frame_bandwidth = estimator.estimate_bytes_per_ms();
      frame_max_cs = std::max(
          config.max_completion_ms,
          payload_max / frame_bandwidth + params.frame_len_ms + proc_max);

      while (next_arrival < arrivals.size() &&
             arrivals[next_arrival].time_ms < frame_end) {
        const ArrivalEvent& event = arrivals[next_arrival++];
        std::vector<ArrivalEvent>& queue =
            queues[static_cast<std::size_t>(event.edge)];
        queue.push_back(event);
        if (static_cast<int>(queue.size()) >= params.queue_cap) {
          fire_batch(event.edge, event.time_ms, frame);
        }
      }
      for (int edge : edge_ids) {
        fire_batch(edge, frame_end, frame);
      }
      estimator =
          estimator.updated(observations[static_cast<std::size_t>(f)]);
      reset_capacities();
    }

    FrameCounters total;
    for (int f = 0; f < params.frames; ++f) {
      const FrameCounters& frame = frames[static_cast<std::size_t>(f)];
      output.per_frame.push_back(
          counters_to_result(frame, f, algorithm_name(algorithm), seed));
      total.absorb(frame);
    }
    output.aggregate.push_back(
        counters_to_result(total, -1, algorithm_name(algorithm), seed));
  }

  // Rows ordered by (frame, algorithm), like monte_carlo orders by (run,
  // algorithm).
  std::stable_sort(output.per_frame.begin(), output.per_frame.end(),
                   [](const RunResult& a, const RunResult& b) {
                     return a.run < b.run;
                   });
  return output;
}

}  // namespace edgesched
