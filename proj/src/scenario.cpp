#include "edgesched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "edgesched/rng.hpp"

namespace edgesched {

DistributionSpec DistributionSpec::constant(double value) {
  DistributionSpec spec;
  spec.kind = DistKind::Constant;
  spec.value = value;
  return spec;
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  DistributionSpec spec;
  spec.kind = DistKind::Uniform;
  spec.lo = lo;
  spec.hi = hi;
  return spec;
}

DistributionSpec DistributionSpec::normal_truncated(double mean, double stddev,
                                                    double lo, double hi) {
  DistributionSpec spec;
  spec.kind = DistKind::NormalTruncated;
  spec.mean = mean;
  spec.stddev = stddev;
  spec.lo = lo;
  spec.hi = hi;
  return spec;
}

double DistributionSpec::draw(std::mt19937_64& rng) const {
  switch (kind) {
    case DistKind::Constant:
      return value;
    case DistKind::Uniform: {
      std::uniform_real_distribution<double> dist(lo, hi);
      return dist(rng);
    }
    case DistKind::NormalTruncated: {
      std::normal_distribution<double> dist(mean, stddev);
      return std::clamp(dist(rng), lo, hi);
    }
  }
  throw InvalidConfigError("unknown distribution kind");
}

double DistributionSpec::min_value() const {
  return kind == DistKind::Constant ? value : lo;
}

double DistributionSpec::max_value() const {
  return kind == DistKind::Constant ? value : hi;
}

int ScenarioConfig::n_edge_servers() const {
  int total = 0;
  for (const ServerClassProfile& profile : edge_classes) {
    total += profile.count;
  }
  return total;
}

namespace {

void fail(const std::string& message) { throw InvalidConfigError(message); }

void check_spec(const DistributionSpec& spec, const std::string& field,
                double lo_bound, double hi_bound) {
  switch (spec.kind) {
    case DistKind::Constant:
      break;
    case DistKind::Uniform:
      if (spec.lo > spec.hi) {
        fail(field + ": uniform requires lo <= hi");
      }
      break;
    case DistKind::NormalTruncated:
      if (spec.stddev < 0.0) {
        fail(field + ": stddev must be >= 0");
      }
      if (spec.lo > spec.hi) {
        fail(field + ": truncation requires lo <= hi");
      }
      break;
  }
  if (spec.min_value() < lo_bound || spec.max_value() > hi_bound) {
    fail(field + ": range [" + std::to_string(spec.min_value()) + ", " +
         std::to_string(spec.max_value()) + "] outside [" +
         std::to_string(lo_bound) + ", " + std::to_string(hi_bound) + "]");
  }
}

void check_class(const ServerClassProfile& profile, const std::string& field,
                 double max_proc_hint) {
  if (profile.name.empty()) {
    fail(field + ": class name must not be empty");
  }
  if (profile.count < 0) {
    fail(field + ": negative server count");
  }
  if (profile.compute_capacity < 0.0 || profile.comm_capacity < 0.0) {
    fail(field + ": negative capacity");
  }
  if (profile.placement_slots < 0) {
    fail(field + ": negative placement slots");
  }
  check_spec(profile.proc_delay_spec, field + ".proc_delay_spec", 0.0,
             max_proc_hint);
}

}  // namespace

void validate_config(const ScenarioConfig& config) {
  if (config.n_requests < 1) {
    fail("n_requests must be >= 1");
  }
  if (config.n_services < 1 || config.n_models < 1) {
    fail("n_services and n_models must be >= 1");
  }
  if (config.edge_classes.empty() || config.n_edge_servers() < 1) {
    fail("at least one edge server is required");
  }
  if (config.cloud.count < 0) {
    fail("cloud count must be >= 0");
  }
  if (config.weight_accuracy < 0.0 || config.weight_accuracy > 1.0 ||
      config.weight_time < 0.0 || config.weight_time > 1.0) {
    fail("weights must lie in [0, 1]");
  }
  if (!(config.max_accuracy > 0.0) || !(config.max_completion_ms > 0.0)) {
    fail("Max_as and Max_cs must be positive");
  }
  if (!(config.bandwidth_bytes_per_ms > 0.0)) {
    fail("bandwidth must be positive");
  }
  if (config.drop_penalty < 0.0) {
    fail("drop_penalty must be >= 0");
  }

  check_spec(config.accuracy_spec, "accuracy_spec", 0.0, 1.0);
  check_spec(config.delay_spec, "delay_spec", 0.0, config.max_completion_ms);
  check_spec(config.queue_delay_spec, "queue_delay_spec", 0.0,
             std::numeric_limits<double>::infinity());
  check_spec(config.payload_spec, "payload_spec", 0.0,
             std::numeric_limits<double>::infinity());
  check_spec(config.model_accuracy_spec, "model_accuracy_spec", 0.0,
             config.max_accuracy);
  check_spec(config.compute_cost_spec, "compute_cost_spec", 0.0,
             std::numeric_limits<double>::infinity());
  check_spec(config.comm_cost_spec, "comm_cost_spec", 0.0,
             std::numeric_limits<double>::infinity());

  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < config.edge_classes.size(); ++c) {
    check_class(config.edge_classes[c], "edge_classes[" + std::to_string(c) + "]",
                inf);
  }
  check_class(config.cloud, "cloud", inf);

  std::vector<int> allowed = config.edge_hosted_models;
  for (int model : allowed) {
    if (model < 0 || model >= config.n_models) {
      fail("edge_hosted_models references model " + std::to_string(model) +
           " outside [0, " + std::to_string(config.n_models) + ")");
    }
  }
  const int allowed_models =
      allowed.empty() ? config.n_models : static_cast<int>(allowed.size());
  const int placeable = config.n_services * allowed_models;
  for (const ServerClassProfile& profile : config.edge_classes) {
    if (profile.placement_slots > placeable) {
      fail("edge class '" + profile.name + "' demands " +
           std::to_string(profile.placement_slots) +
           " placed pairs but only " + std::to_string(placeable) + " exist");
    }
  }
}

namespace {

// Catalog, servers and link table shared by every request of an instance.
struct GeneratedSystem {
  ModelCatalog catalog;
  std::vector<Server> servers;
  DelayTable delays;
  std::vector<int> edge_ids;
};

GeneratedSystem generate_system(const ScenarioConfig& config,
                                std::mt19937_64& rng) {
  GeneratedSystem system;
  const int num_services = config.n_services;
  const int num_models = config.n_models;

  std::vector<std::string> class_names;
  for (const ServerClassProfile& profile : config.edge_classes) {
    class_names.push_back(profile.name);
  }
  class_names.push_back(config.cloud.name.empty() ? "cloud" : config.cloud.name);
  const int cloud_class = static_cast<int>(class_names.size()) - 1;

  system.catalog = ModelCatalog(num_services, num_models, class_names);

  // Model accuracies: one draw per (service, model), sorted so a higher model
  // index never has lower accuracy.
  std::vector<double> draws(static_cast<std::size_t>(num_models));
  for (int k = 0; k < num_services; ++k) {
    for (double& d : draws) {
      d = config.model_accuracy_spec.draw(rng);
    }
    std::sort(draws.begin(), draws.end());
    for (int l = 0; l < num_models; ++l) {
      system.catalog.set_accuracy(k, l, draws[static_cast<std::size_t>(l)]);
    }
  }

  // Unit-style costs, rounded to whole capacity units.
  for (int k = 0; k < num_services; ++k) {
    for (int l = 0; l < num_models; ++l) {
      system.catalog.set_compute_cost(
          k, l, std::max(0.0, std::round(config.compute_cost_spec.draw(rng))));
      system.catalog.set_comm_cost(
          k, l, std::max(0.0, std::round(config.comm_cost_spec.draw(rng))));
    }
  }

  // Processing delays per (class, service, model), sorted ascending in the
  // model index to pair higher accuracy with higher runtime.
  for (std::size_t c = 0; c < config.edge_classes.size(); ++c) {
    for (int k = 0; k < num_services; ++k) {
      for (double& d : draws) {
        d = config.edge_classes[c].proc_delay_spec.draw(rng);
      }
      std::sort(draws.begin(), draws.end());
      for (int l = 0; l < num_models; ++l) {
        system.catalog.set_proc_delay_ms(static_cast<int>(c), k, l,
                                         draws[static_cast<std::size_t>(l)]);
      }
    }
  }
  for (int k = 0; k < num_services; ++k) {
    for (double& d : draws) {
      d = config.cloud.proc_delay_spec.draw(rng);
    }
    std::sort(draws.begin(), draws.end());
    for (int l = 0; l < num_models; ++l) {
      system.catalog.set_proc_delay_ms(cloud_class, k, l,
                                       draws[static_cast<std::size_t>(l)]);
    }
  }

  // Placeable (service, model) pairs on edge servers.
  std::vector<int> allowed_models = config.edge_hosted_models;
  if (allowed_models.empty()) {
    allowed_models.resize(static_cast<std::size_t>(num_models));
    std::iota(allowed_models.begin(), allowed_models.end(), 0);
  } else {
    std::sort(allowed_models.begin(), allowed_models.end());
  }
  std::vector<std::pair<int, int>> placeable;
  placeable.reserve(static_cast<std::size_t>(num_services) * allowed_models.size());
  for (int k = 0; k < num_services; ++k) {
    for (int l : allowed_models) {
      placeable.emplace_back(k, l);
    }
  }

  int next_id = 0;
  std::vector<int> order(placeable.size());
  for (std::size_t c = 0; c < config.edge_classes.size(); ++c) {
    const ServerClassProfile& profile = config.edge_classes[c];
    for (int rep = 0; rep < profile.count; ++rep) {
      Server server;
      server.id = next_id++;
      server.kind = ServerKind::Edge;
      server.compute_capacity = profile.compute_capacity;
      server.comm_capacity = profile.comm_capacity;
      server.perf_class = static_cast<int>(c);
      server.hosted = HostedSet(num_services, num_models);

      // Uniform sample without replacement, up to the class slot budget.
      const int slots =
          std::min<int>(profile.placement_slots, static_cast<int>(placeable.size()));
      std::iota(order.begin(), order.end(), 0);
      for (int s = 0; s < slots; ++s) {
        std::uniform_int_distribution<int> pick(s, static_cast<int>(order.size()) - 1);
        std::swap(order[static_cast<std::size_t>(s)],
                  order[static_cast<std::size_t>(pick(rng))]);
        const auto& pair = placeable[static_cast<std::size_t>(order[static_cast<std::size_t>(s)])];
        server.hosted.add(pair.first, pair.second);
      }
      system.edge_ids.push_back(server.id);
      system.servers.push_back(std::move(server));
    }
  }
  for (int rep = 0; rep < config.cloud.count; ++rep) {
    Server server;
    server.id = next_id++;
    server.kind = ServerKind::Cloud;
    server.compute_capacity = config.cloud.compute_capacity;
    server.comm_capacity = config.cloud.comm_capacity;
    server.perf_class = cloud_class;
    server.hosted = HostedSet(num_services, num_models);
    for (int k = 0; k < num_services; ++k) {
      for (int l = 0; l < num_models; ++l) {
        server.hosted.add(k, l);
      }
    }
    system.servers.push_back(std::move(server));
  }

  system.delays = DelayTable(next_id);
  system.delays.fill_bandwidth(config.bandwidth_bytes_per_ms);
  return system;
}

ProblemInstance assemble_system(const ScenarioConfig& config,
                                std::mt19937_64& rng,
                                std::vector<int>* edge_ids_out) {
  GeneratedSystem system = generate_system(config, rng);
  if (edge_ids_out != nullptr) {
    *edge_ids_out = system.edge_ids;
  }
  ProblemInstance instance;
  instance.catalog = std::move(system.catalog);
  instance.servers = std::move(system.servers);
  instance.delays = std::move(system.delays);
  instance.max_accuracy = config.max_accuracy;
  instance.max_completion_ms = config.max_completion_ms;
  instance.mode = config.mode;
  instance.drop_penalty = config.drop_penalty;
  return instance;
}

}  // namespace

Request draw_request(const ScenarioConfig& config, std::mt19937_64& rng,
                     int id, std::span<const int> edge_ids) {
  Request request;
  request.id = id;
  std::uniform_int_distribution<int> service_pick(0, config.n_services - 1);
  request.service = service_pick(rng);
  std::uniform_int_distribution<std::size_t> edge_pick(0, edge_ids.size() - 1);
  request.covering_server = edge_ids[edge_pick(rng)];
  request.min_accuracy = config.accuracy_spec.draw(rng);
  request.max_completion_ms = config.delay_spec.draw(rng);
  request.weight_accuracy = config.weight_accuracy;
  request.weight_time = config.weight_time;
  request.queue_delay_ms = config.queue_delay_spec.draw(rng);
  request.payload_bytes =
      std::max<std::int64_t>(0, std::llround(config.payload_spec.draw(rng)));
  return request;
}

ProblemInstance generate_instance(const ScenarioConfig& config,
                                  std::uint64_t seed) {
  validate_config(config);
  std::mt19937_64 rng(splitmix64(seed));

  std::vector<int> edge_ids;
  ProblemInstance instance = assemble_system(config, rng, &edge_ids);
  instance.requests.reserve(static_cast<std::size_t>(config.n_requests));
  for (int i = 0; i < config.n_requests; ++i) {
    instance.requests.push_back(draw_request(config, rng, i, edge_ids));
  }

  try {
    validate_instance(instance);
  } catch (const InvalidInstanceError& error) {
    throw InvalidConfigError(std::string("config produces invalid instances: ") +
                             error.what());
  }
  return instance;
}

ProblemInstance generate_system_instance(const ScenarioConfig& config,
                                         std::uint64_t seed) {
  validate_config(config);
  std::mt19937_64 rng(splitmix64(seed));
  ProblemInstance instance = assemble_system(config, rng, nullptr);
  validate_instance(instance);
  return instance;
}

ScenarioConfig paper_default_profile() {
  ScenarioConfig config;
  config.name = "paper_default";
  config.mode = Mode::Strict;
  config.n_requests = 100;
  config.n_services = 100;
  config.n_models = 10;

  // Three edge classes; capacities and slot budgets give a system that
  // saturates around the default load.
  ServerClassProfile small{"edge-small", 3,
                           DistributionSpec::uniform(950.0, 1300.0), 2.0, 4.0,
                           10};
  ServerClassProfile medium{"edge-medium", 3,
                            DistributionSpec::uniform(950.0, 1300.0), 4.0, 8.0,
                            20};
  ServerClassProfile large{"edge-large", 3,
                           DistributionSpec::uniform(950.0, 1300.0), 8.0, 16.0,
                           40};
  config.edge_classes = {small, medium, large};
  config.cloud = ServerClassProfile{"cloud", 1,
                                    DistributionSpec::constant(300.0), 30.0,
                                    200.0, 0};

  config.accuracy_spec =
      DistributionSpec::normal_truncated(0.45, 0.10, 0.0, 1.0);
  config.delay_spec =
      DistributionSpec::normal_truncated(2500.0, 400.0, 0.0, 12000.0);
  config.queue_delay_spec = DistributionSpec::uniform(0.0, 50.0);
  config.payload_spec = DistributionSpec::constant(180000.0);
  config.model_accuracy_spec = DistributionSpec::uniform(0.30, 0.95);

  config.weight_accuracy = 1.0;
  config.weight_time = 1.0;
  config.max_accuracy = 1.0;
  config.max_completion_ms = 12000.0;
  config.bandwidth_bytes_per_ms = 600.0;
  return config;
}

ScenarioConfig testbed_profile() {
  ScenarioConfig config;
  config.name = "testbed";
  config.mode = Mode::Strict;
  config.n_requests = 40;  // saturates the 2x(3+10)+20 capacity budget
  config.n_services = 1;
  config.n_models = 2;

  ServerClassProfile edge{"edge-rpi4", 2, DistributionSpec::constant(1300.0),
                          3.0, 10.0, 1};
  config.edge_classes = {edge};
  config.cloud = ServerClassProfile{"cloud-desktop", 1,
                                    DistributionSpec::constant(300.0), 20.0,
                                    100.0, 0};

  config.accuracy_spec = DistributionSpec::constant(0.5);
  config.delay_spec = DistributionSpec::constant(53000.0);
  config.queue_delay_spec = DistributionSpec::uniform(0.0, 3000.0);
  config.payload_spec = DistributionSpec::constant(180000.0);
  // Model 0 plays the small edge-resident network, model 1 the larger
  // cloud-only one; sorting keeps the cloud model at least as accurate.
  config.model_accuracy_spec = DistributionSpec::uniform(0.55, 0.75);
  config.edge_hosted_models = {0};

  config.weight_accuracy = 1.0;
  config.weight_time = 1.0;
  config.max_accuracy = 1.0;
  config.max_completion_ms = 60000.0;
  config.bandwidth_bytes_per_ms = 600.0;
  return config;
}

ScenarioConfig small_profile() {
  ScenarioConfig config;
  config.name = "small";
  config.mode = Mode::Strict;
  config.n_requests = 6;
  config.n_services = 2;
  config.n_models = 2;

  ServerClassProfile tight{"edge-a", 1, DistributionSpec::uniform(950.0, 1300.0),
                           1.0, 1.0, 2};
  ServerClassProfile loose{"edge-b", 1, DistributionSpec::uniform(950.0, 1300.0),
                           2.0, 1.0, 3};
  config.edge_classes = {tight, loose};
  config.cloud = ServerClassProfile{"cloud", 1, DistributionSpec::constant(300.0),
                                    2.0, 10.0, 0};

  config.accuracy_spec =
      DistributionSpec::normal_truncated(0.55, 0.15, 0.0, 1.0);
  config.delay_spec =
      DistributionSpec::normal_truncated(1500.0, 400.0, 0.0, 12000.0);
  config.queue_delay_spec = DistributionSpec::uniform(0.0, 50.0);
  config.payload_spec = DistributionSpec::constant(180000.0);
  config.model_accuracy_spec = DistributionSpec::uniform(0.30, 0.95);

  config.weight_accuracy = 1.0;
  config.weight_time = 1.0;
  config.max_accuracy = 1.0;
  config.max_completion_ms = 12000.0;
  config.bandwidth_bytes_per_ms = 600.0;
  return config;
}

std::optional<ScenarioConfig> builtin_config(std::string_view name) {
  if (name == "paper_default") {
    return paper_default_profile();
  }
  if (name == "testbed") {
    return testbed_profile();
  }
  if (name == "small") {
    return small_profile();
  }
  return std::nullopt;
}

}  // namespace edgesched
