#pragma once

// Hand-built fixtures shared by the unit tests.

#include <string>
#include <vector>

#include "edgesched/model.hpp"

namespace edgesched::testing {

struct SimpleSpec {
  int n_edges = 1;
  int n_cloud = 1;
  int n_services = 1;
  int n_models = 1;
  double edge_compute = 10.0;
  double edge_comm = 10.0;
  double cloud_compute = 10.0;
  double cloud_comm = 10.0;
  double edge_proc_ms = 1300.0;
  double cloud_proc_ms = 300.0;
  double bandwidth = 600.0;
  double model_accuracy = 0.8;
  double max_accuracy = 1.0;
  double max_completion_ms = 12000.0;
  Mode mode = Mode::Strict;
};

// One performance class per tier, every server hosting every pair, uniform
// link bandwidth. Tests tweak the result before adding requests.
inline ProblemInstance make_simple(const SimpleSpec& spec = {}) {
  ProblemInstance instance;
  instance.catalog = ModelCatalog(spec.n_services, spec.n_models,
                                  {"edge-class", "cloud-class"});
  for (int k = 0; k < spec.n_services; ++k) {
    for (int l = 0; l < spec.n_models; ++l) {
      instance.catalog.set_accuracy(k, l, spec.model_accuracy);
      instance.catalog.set_proc_delay_ms(0, k, l, spec.edge_proc_ms);
      instance.catalog.set_proc_delay_ms(1, k, l, spec.cloud_proc_ms);
    }
  }
  const int total = spec.n_edges + spec.n_cloud;
  for (int j = 0; j < total; ++j) {
    Server server;
    server.id = j;
    const bool cloud = j >= spec.n_edges;
    server.kind = cloud ? ServerKind::Cloud : ServerKind::Edge;
    server.compute_capacity = cloud ? spec.cloud_compute : spec.edge_compute;
    server.comm_capacity = cloud ? spec.cloud_comm : spec.edge_comm;
    server.perf_class = cloud ? 1 : 0;
    server.hosted = HostedSet(spec.n_services, spec.n_models);
    for (int k = 0; k < spec.n_services; ++k) {
      for (int l = 0; l < spec.n_models; ++l) {
        server.hosted.add(k, l);
      }
    }
    instance.servers.push_back(std::move(server));
  }
  instance.delays = DelayTable(total);
  instance.delays.fill_bandwidth(spec.bandwidth);
  instance.max_accuracy = spec.max_accuracy;
  instance.max_completion_ms = spec.max_completion_ms;
  instance.mode = spec.mode;
  return instance;
}

inline Request make_request(int id, int covering, int service,
                            double min_accuracy, double max_completion_ms,
                            double queue_delay_ms = 0.0,
                            std::int64_t payload_bytes = 0,
                            double weight_accuracy = 1.0,
                            double weight_time = 1.0) {
  Request request;
  request.id = id;
  request.covering_server = covering;
  request.service = service;
  request.min_accuracy = min_accuracy;
  request.max_completion_ms = max_completion_ms;
  request.queue_delay_ms = queue_delay_ms;
  request.payload_bytes = payload_bytes;
  request.weight_accuracy = weight_accuracy;
  request.weight_time = weight_time;
  return request;
}

}  // namespace edgesched::testing
