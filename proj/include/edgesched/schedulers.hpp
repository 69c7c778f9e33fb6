#pragma once

#include <cstdint>
#include <vector>

#include "edgesched/model.hpp"
#include "edgesched/schedule.hpp"

// Request schedulers: the US-greedy algorithm, the comparison baselines, the
// exact branch-and-bound optimizer and the exhaustive oracle.

namespace edgesched {

// An instance exceeds the size guard of the exact or brute-force solver.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

// One (server, model) option for a request, with its realized quality.
struct Candidate {
  int server = 0;
  int model = 0;
  double accuracy = 0.0;
  double completion_ms = 0.0;
  double us = 0.0;
};

// All hosted, reachable (server, model) pairs for the request's service,
// regardless of thresholds or capacities.
std::vector<Candidate> candidate_pairs(const ProblemInstance& instance,
                                       const Request& request);

// Orders candidates by US descending; ties prefer the local server, then the
// lower server index, then the lower model index.
void sort_candidates(std::vector<Candidate>& candidates, int covering_server);

// Greedy US scheduler: requests in input order, each assigned to the first
// candidate (in sort_candidates order) passing is_candidate, or dropped.
Schedule gus(const ProblemInstance& instance);

// Picks one eligible server uniformly at random per request (eligible =
// hosts the service and, in strict mode, has a model meeting the thresholds)
// and serves it there with the best such model if capacities allow;
// otherwise the request is dropped.
Schedule random_assignment(const ProblemInstance& instance,
                           std::uint64_t seed);

// Only cloud servers are considered.
Schedule offload_all(const ProblemInstance& instance);

// Only the covering server is considered.
Schedule local_all(const ProblemInstance& instance);

// GUS with the computation capacity check disabled.
Schedule happy_computation(const ProblemInstance& instance);

// GUS with the communication capacity check disabled.
Schedule happy_communication(const ProblemInstance& instance);

struct ExactLimits {
  int max_variables = 400;             // guard on |N| * |M| * |L|
  std::int64_t max_nodes = 50'000'000;  // search budget
};

struct ExactResult {
  Schedule schedule;
  bool proven_optimal = true;
  std::int64_t nodes_explored = 0;
};

// Depth-first branch and bound over per-request (server, model)/drop choices
// with an admissible per-request best-US bound. Throws InstanceTooLargeError
// when the variable guard is exceeded; returns the incumbent with
// proven_optimal = false when the node budget runs out.
ExactResult exact_solve(const ProblemInstance& instance,
                        const ExactLimits& limits = {});

// Exhaustive enumeration of all feasible decision vectors. Intentionally
// independent of exact_solve; the two cross-check each other. Requires
// (|M|*|L| + 1)^|N| <= 1e7.
Schedule brute_force(const ProblemInstance& instance);

}  // namespace edgesched
