#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain model for accuracy/delay-aware request scheduling in a
// user-edge-cloud system: requests, servers, the model catalog, link
// bandwidths, and the pure functions (completion time, user satisfaction,
// candidate feasibility) that every scheduler builds on.

namespace edgesched {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A referenced (server, service, model) combination is not hosted.
class NotHostedError : public Error {
 public:
  using Error::Error;
};

// A required bandwidth/delay entry is missing or invalid.
class ModelInconsistencyError : public Error {
 public:
  using Error::Error;
};

// A ProblemInstance violates one of its structural invariants.
class InvalidInstanceError : public Error {
 public:
  using Error::Error;
};

enum class ServerKind { Edge, Cloud };

// Strict mode treats the per-request accuracy/delay thresholds as hard
// feasibility constraints; soft mode lets them enter the objective only.
enum class Mode { Strict, Soft };

struct Request {
  int id = 0;
  int service = 0;                 // k
  double min_accuracy = 0.0;       // A_i, fraction in [0,1]
  double max_completion_ms = 0.0;  // C_i
  double weight_accuracy = 1.0;    // w_ai in [0,1]
  double weight_time = 1.0;        // w_ci in [0,1]
  int covering_server = 0;         // s_i, always an edge server
  std::int64_t payload_bytes = 0;
  double queue_delay_ms = 0.0;     // T_q
};

// Set of (service, model) pairs hosted by a server, with per-service lookup.
class HostedSet {
 public:
  HostedSet() = default;
  HostedSet(int num_services, int num_models);

  void add(int service, int model);
  bool contains(int service, int model) const;
  std::span<const int> models_for(int service) const;

  int num_pairs() const { return count_; }
  int num_services() const { return static_cast<int>(by_service_.size()); }
  int num_models() const { return num_models_; }

 private:
  std::vector<std::vector<int>> by_service_;  // sorted model indices per service
  int num_models_ = 0;
  int count_ = 0;
};

struct Server {
  int id = 0;
  ServerKind kind = ServerKind::Edge;
  double compute_capacity = 0.0;  // gamma_j
  double comm_capacity = 0.0;     // eta_j
  int perf_class = 0;             // index into ModelCatalog class table
  HostedSet hosted;
};

// Accuracy and unit costs per (service, model), and processing delays per
// (performance class, service, model). Accuracy is a property of the model;
// processing delay additionally depends on the device class running it.
class ModelCatalog {
 public:
  ModelCatalog() = default;
  ModelCatalog(int num_services, int num_models,
               std::vector<std::string> class_names);

  int num_services() const { return num_services_; }
  int num_models() const { return num_models_; }
  int num_classes() const { return static_cast<int>(class_names_.size()); }
  const std::string& class_name(int c) const { return class_names_.at(c); }
  const std::vector<std::string>& class_names() const { return class_names_; }

  double accuracy(int service, int model) const;
  double proc_delay_ms(int perf_class, int service, int model) const;
  double compute_cost(int service, int model) const;  // v
  double comm_cost(int service, int model) const;     // u

  void set_accuracy(int service, int model, double value);
  void set_proc_delay_ms(int perf_class, int service, int model, double ms);
  void set_compute_cost(int service, int model, double units);
  void set_comm_cost(int service, int model, double units);

 private:
  int pair_index(int service, int model) const;

  int num_services_ = 0;
  int num_models_ = 0;
  std::vector<std::string> class_names_;
  std::vector<double> accuracy_;
  std::vector<double> compute_cost_;
  std::vector<double> comm_cost_;
  std::vector<double> proc_delay_;  // class-major, then (service, model)
};

// Pairwise link bandwidths. Communication delay for a payload is
// payload / bandwidth; a server reaches itself with zero delay.
class DelayTable {
 public:
  DelayTable() = default;
  explicit DelayTable(int num_servers);

  int num_servers() const { return n_; }
  void set_bandwidth(int from, int to, double bytes_per_ms);
  void fill_bandwidth(double bytes_per_ms);  // every off-diagonal pair
  double bandwidth(int from, int to) const;  // <= 0 means unconnected
  bool connected(int from, int to) const;

  // Throws ModelInconsistencyError when from != to and no bandwidth entry
  // exists for the pair.
  double comm_delay_ms(int from, int to, double payload_bytes) const;

 private:
  int n_ = 0;
  std::vector<double> bw_;
};

struct ProblemInstance {
  std::vector<Request> requests;
  std::vector<Server> servers;
  ModelCatalog catalog;
  DelayTable delays;
  double max_accuracy = 1.0;       // Max_as, divisor of the accuracy term
  double max_completion_ms = 1.0;  // Max_cs, divisor of the time term
  Mode mode = Mode::Strict;
  double drop_penalty = 0.0;  // objective penalty per dropped request (0 = off)

  int num_requests() const { return static_cast<int>(requests.size()); }
  int num_servers() const { return static_cast<int>(servers.size()); }
  bool is_cloud(int server) const {
    return servers[server].kind == ServerKind::Cloud;
  }
};

// Checks every structural invariant (threshold ranges, covering servers,
// cloud hosting, capacity signs, connectivity, Max_as/Max_cs consistency).
// Throws InvalidInstanceError with a description of the first violation.
void validate_instance(const ProblemInstance& instance);

// Completion time of serving `request` at `server` with model `model` of the
// request's service: queue delay + processing delay, plus payload/bandwidth
// when the server is not the covering one.
double completion_time_ms(const ProblemInstance& instance,
                          const Request& request, int server, int model);

// US = w_ai * (a - A_i) / Max_as + w_ci * (C_i - c) / Max_cs. Not clamped;
// soft mode can observe negative values.
double user_satisfaction(const ProblemInstance& instance,
                         const Request& request, double accuracy,
                         double completion_ms);

// Remaining per-server capacities during one scheduler invocation. A relaxed
// dimension reports infinite remaining capacity and never depletes.
class CapacityState {
 public:
  explicit CapacityState(const ProblemInstance& instance,
                         bool relax_compute = false, bool relax_comm = false);

  double remaining_compute(int server) const { return compute_[server]; }
  double remaining_comm(int server) const { return comm_[server]; }

  // Charges compute at `server` and, for offloads, comm at the covering
  // server. Only call after is_candidate accepted the pair.
  void consume(const ProblemInstance& instance, const Request& request,
               int server, int model);

 private:
  std::vector<double> compute_;
  std::vector<double> comm_;
};

// True iff (server, model) can serve the request right now: the pair is
// hosted and reachable, the thresholds hold (strict mode only), compute cost
// fits the server and, for offloads, comm cost fits the covering server.
bool is_candidate(const ProblemInstance& instance, const Request& request,
                  int server, int model, const CapacityState& state);

}  // namespace edgesched
