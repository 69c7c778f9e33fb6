#include "edgesched/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace edgesched {

namespace {

std::string describe_pair(int service, int model) {
  std::ostringstream os;
  os << "(service " << service << ", model " << model << ")";
  return os.str();
}

}  // namespace

HostedSet::HostedSet(int num_services, int num_models)
    : by_service_(static_cast<std::size_t>(num_services)),
      num_models_(num_models) {}

void HostedSet::add(int service, int model) {
  auto& models = by_service_.at(static_cast<std::size_t>(service));
  auto it = std::lower_bound(models.begin(), models.end(), model);
  if (it != models.end() && *it == model) {
    return;
  }
  models.insert(it, model);
  ++count_;
}

bool HostedSet::contains(int service, int model) const {
  if (service < 0 || service >= num_services()) {
    return false;
  }
  const auto& models = by_service_[static_cast<std::size_t>(service)];
  return std::binary_search(models.begin(), models.end(), model);
}

std::span<const int> HostedSet::models_for(int service) const {
  if (service < 0 || service >= num_services()) {
    return {};
  }
  return by_service_[static_cast<std::size_t>(service)];
}

ModelCatalog::ModelCatalog(int num_services, int num_models,
                           std::vector<std::string> class_names)
    : num_services_(num_services),
      num_models_(num_models),
      class_names_(std::move(class_names)) {
  const std::size_t pairs =
      static_cast<std::size_t>(num_services) * static_cast<std::size_t>(num_models);
  accuracy_.assign(pairs, 0.0);
  compute_cost_.assign(pairs, 1.0);
  comm_cost_.assign(pairs, 1.0);
  proc_delay_.assign(pairs * class_names_.size(), 0.0);
}

int ModelCatalog::pair_index(int service, int model) const {
  if (service < 0 || service >= num_services_ || model < 0 ||
      model >= num_models_) {
    throw NotHostedError("catalog has no entry for " +
                         describe_pair(service, model));
  }
  return service * num_models_ + model;
}

double ModelCatalog::accuracy(int service, int model) const {
  return accuracy_[pair_index(service, model)];
}

double ModelCatalog::proc_delay_ms(int perf_class, int service,
                                   int model) const {
  if (perf_class < 0 || perf_class >= num_classes()) {
    throw ModelInconsistencyError("unknown performance class index " +
                                  std::to_string(perf_class));
  }
  const std::size_t stride =
      static_cast<std::size_t>(num_services_) * static_cast<std::size_t>(num_models_);
  return proc_delay_[static_cast<std::size_t>(perf_class) * stride +
                     static_cast<std::size_t>(pair_index(service, model))];
}

double ModelCatalog::compute_cost(int service, int model) const {
  return compute_cost_[pair_index(service, model)];
}

double ModelCatalog::comm_cost(int service, int model) const {
  return comm_cost_[pair_index(service, model)];
}

void ModelCatalog::set_accuracy(int service, int model, double value) {
  accuracy_[pair_index(service, model)] = value;
}

void ModelCatalog::set_proc_delay_ms(int perf_class, int service, int model,
                                     double ms) {
  if (perf_class < 0 || perf_class >= num_classes()) {
    throw ModelInconsistencyError("unknown performance class index " +
                                  std::to_string(perf_class));
  }
  const std::size_t stride =
      static_cast<std::size_t>(num_services_) * static_cast<std::size_t>(num_models_);
  proc_delay_[static_cast<std::size_t>(perf_class) * stride +
              static_cast<std::size_t>(pair_index(service, model))] = ms;
}

void ModelCatalog::set_compute_cost(int service, int model, double units) {
  compute_cost_[pair_index(service, model)] = units;
}

void ModelCatalog::set_comm_cost(int service, int model, double units) {
  comm_cost_[pair_index(service, model)] = units;
}

DelayTable::DelayTable(int num_servers)
    : n_(num_servers),
      bw_(static_cast<std::size_t>(num_servers) * static_cast<std::size_t>(num_servers),
          0.0) {}

void DelayTable::set_bandwidth(int from, int to, double bytes_per_ms) {
  bw_.at(static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
         static_cast<std::size_t>(to)) = bytes_per_ms;
}

void DelayTable::fill_bandwidth(double bytes_per_ms) {
  for (int from = 0; from < n_; ++from) {
    for (int to = 0; to < n_; ++to) {
      if (from != to) {
        set_bandwidth(from, to, bytes_per_ms);
      }
    }
  }
}

double DelayTable::bandwidth(int from, int to) const {
  return bw_.at(static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
                static_cast<std::size_t>(to));
}

bool DelayTable::connected(int from, int to) const {
  return from == to || bandwidth(from, to) > 0.0;
}

double DelayTable::comm_delay_ms(int from, int to,
                                 double payload_bytes) const {
  if (from == to) {
    return 0.0;
  }
  const double bw = bandwidth(from, to);
  if (!(bw > 0.0)) {
    throw ModelInconsistencyError("no bandwidth entry for link " +
                                  std::to_string(from) + " -> " +
                                  std::to_string(to));
  }
  return payload_bytes / bw;
}

double completion_time_ms(const ProblemInstance& instance,
                          const Request& request, int server, int model) {
  const Server& target = instance.servers.at(static_cast<std::size_t>(server));
  if (!target.hosted.contains(request.service, model)) {
    throw NotHostedError("server " + std::to_string(server) + " does not host " +
                         describe_pair(request.service, model));
  }
  const double proc = instance.catalog.proc_delay_ms(target.perf_class,
                                                     request.service, model);
  if (server == request.covering_server) {
    return request.queue_delay_ms + proc;
  }
  const double comm = instance.delays.comm_delay_ms(
      request.covering_server, server,
      static_cast<double>(request.payload_bytes));
  return comm + request.queue_delay_ms + proc;
}

double user_satisfaction(const ProblemInstance& instance,
                         const Request& request, double accuracy,
                         double completion_ms) {
  return request.weight_accuracy * (accuracy - request.min_accuracy) /
             instance.max_accuracy +
         request.weight_time * (request.max_completion_ms - completion_ms) /
             instance.max_completion_ms;
}

CapacityState::CapacityState(const ProblemInstance& instance,
                             bool relax_compute, bool relax_comm) {
  const double inf = std::numeric_limits<double>::infinity();
  compute_.reserve(instance.servers.size());
  comm_.reserve(instance.servers.size());
  for (const Server& server : instance.servers) {
    compute_.push_back(relax_compute ? inf : server.compute_capacity);
    comm_.push_back(relax_comm ? inf : server.comm_capacity);
  }
}

void CapacityState::consume(const ProblemInstance& instance,
                            const Request& request, int server, int model) {
  compute_[server] -= instance.catalog.compute_cost(request.service, model);
  if (server != request.covering_server) {
    comm_[request.covering_server] -=
        instance.catalog.comm_cost(request.service, model);
  }
}

bool is_candidate(const ProblemInstance& instance, const Request& request,
                  int server, int model, const CapacityState& state) {
  const Server& target = instance.servers[static_cast<std::size_t>(server)];
  if (!target.hosted.contains(request.service, model)) {
    return false;
  }
  const bool offload = server != request.covering_server;
  if (offload && !instance.delays.connected(request.covering_server, server)) {
    return false;
  }
  if (instance.mode == Mode::Strict) {
    if (instance.catalog.accuracy(request.service, model) <
        request.min_accuracy) {
      return false;
    }
    if (completion_time_ms(instance, request, server, model) >
        request.max_completion_ms) {
      return false;
    }
  }
  if (instance.catalog.compute_cost(request.service, model) >
      state.remaining_compute(server)) {
    return false;
  }
  if (offload && instance.catalog.comm_cost(request.service, model) >
                     state.remaining_comm(request.covering_server)) {
    return false;
  }
  return true;
}

namespace {

void fail(const std::string& message) { throw InvalidInstanceError(message); }

}  // namespace

void validate_instance(const ProblemInstance& instance) {
  const int num_servers = instance.num_servers();
  const int num_services = instance.catalog.num_services();
  const int num_models = instance.catalog.num_models();

  if (!(instance.max_accuracy > 0.0)) {
    fail("Max_as must be positive");
  }
  if (!(instance.max_completion_ms > 0.0)) {
    fail("Max_cs must be positive");
  }

  for (int j = 0; j < num_servers; ++j) {
    const Server& server = instance.servers[static_cast<std::size_t>(j)];
    if (server.id != j) {
      fail("server " + std::to_string(j) + " has mismatched id");
    }
    if (!(server.compute_capacity >= 0.0) ||
        !std::isfinite(server.compute_capacity)) {
      fail("server " + std::to_string(j) + " has invalid compute capacity");
    }
    if (!(server.comm_capacity >= 0.0) ||
        !std::isfinite(server.comm_capacity)) {
      fail("server " + std::to_string(j) + " has invalid comm capacity");
    }
    if (server.perf_class < 0 ||
        server.perf_class >= instance.catalog.num_classes()) {
      fail("server " + std::to_string(j) + " references unknown perf class");
    }
    if (server.kind == ServerKind::Cloud &&
        server.hosted.num_pairs() != num_services * num_models) {
      fail("cloud server " + std::to_string(j) +
           " must host every (service, model) pair");
    }
  }

  for (int k = 0; k < num_services; ++k) {
    for (int l = 0; l < num_models; ++l) {
      const double a = instance.catalog.accuracy(k, l);
      if (a < 0.0 || a > 1.0) {
        fail("catalog accuracy out of [0,1] for " + describe_pair(k, l));
      }
      if (a > instance.max_accuracy + 1e-12) {
        fail("catalog accuracy exceeds Max_as for " + describe_pair(k, l));
      }
      if (instance.catalog.compute_cost(k, l) < 0.0 ||
          instance.catalog.comm_cost(k, l) < 0.0) {
        fail("negative cost for " + describe_pair(k, l));
      }
      for (int c = 0; c < instance.catalog.num_classes(); ++c) {
        if (instance.catalog.proc_delay_ms(c, k, l) < 0.0) {
          fail("negative processing delay for class " + std::to_string(c));
        }
      }
    }
  }

  // Every edge server must reach every other server.
  for (int j = 0; j < num_servers; ++j) {
    if (instance.is_cloud(j)) {
      continue;
    }
    for (int other = 0; other < num_servers; ++other) {
      if (other != j && !instance.delays.connected(j, other)) {
        fail("edge server " + std::to_string(j) + " has no link to server " +
             std::to_string(other));
      }
    }
  }

  double max_achievable = 0.0;
  for (const Request& request : instance.requests) {
    if (request.service < 0 || request.service >= num_services) {
      fail("request " + std::to_string(request.id) +
           " asks for unknown service");
    }
    if (request.min_accuracy < 0.0 || request.min_accuracy > 1.0) {
      fail("request " + std::to_string(request.id) + " has A_i out of [0,1]");
    }
    if (request.max_completion_ms < 0.0) {
      fail("request " + std::to_string(request.id) + " has negative C_i");
    }
    if (request.weight_accuracy < 0.0 || request.weight_accuracy > 1.0 ||
        request.weight_time < 0.0 || request.weight_time > 1.0) {
      fail("request " + std::to_string(request.id) +
           " has weights out of [0,1]");
    }
    if (request.payload_bytes < 0) {
      fail("request " + std::to_string(request.id) + " has negative payload");
    }
    if (request.queue_delay_ms < 0.0) {
      fail("request " + std::to_string(request.id) +
           " has negative queue delay");
    }
    if (request.covering_server < 0 ||
        request.covering_server >= num_servers ||
        instance.is_cloud(request.covering_server)) {
      fail("request " + std::to_string(request.id) +
           " is not covered by an edge server");
    }
    for (int j = 0; j < num_servers; ++j) {
      if (j != request.covering_server &&
          !instance.delays.connected(request.covering_server, j)) {
        continue;
      }
      for (int l : instance.servers[static_cast<std::size_t>(j)].hosted.models_for(
               request.service)) {
        max_achievable = std::max(
            max_achievable, completion_time_ms(instance, request, j, l));
      }
    }
  }
  if (max_achievable > instance.max_completion_ms + 1e-9) {
    fail("Max_cs smaller than an achievable completion time (" +
         std::to_string(max_achievable) + " ms)");
  }
}

}  // namespace edgesched
