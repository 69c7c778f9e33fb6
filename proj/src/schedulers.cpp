#include "edgesched/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace edgesched {

std::vector<Candidate> candidate_pairs(const ProblemInstance& instance,
                                       const Request& request) {
  std::vector<Candidate> candidates;
  for (const Server& server : instance.servers) {
    if (server.id != request.covering_server &&
        !instance.delays.connected(request.covering_server, server.id)) {
      continue;
    }
    for (int model : server.hosted.models_for(request.service)) {
      Candidate candidate;
      candidate.server = server.id;
      candidate.model = model;
      candidate.accuracy = instance.catalog.accuracy(request.service, model);
      candidate.completion_ms =
          completion_time_ms(instance, request, server.id, model);
      candidate.us = user_satisfaction(instance, request, candidate.accuracy,
                                       candidate.completion_ms);
      candidates.push_back(candidate);
    }
  }
  return candidates;
}

void sort_candidates(std::vector<Candidate>& candidates, int covering_server) {
  std::sort(candidates.begin(), candidates.end(),
            [covering_server](const Candidate& a, const Candidate& b) {
              if (a.us != b.us) {
                return a.us > b.us;
              }
              const bool a_local = a.server == covering_server;
              const bool b_local = b.server == covering_server;
              if (a_local != b_local) {
                return a_local;
              }
              if (a.server != b.server) {
                return a.server < b.server;
              }
              return a.model < b.model;
            });
}

namespace {

Assignment assignment_from_candidate(const ProblemInstance& instance,
                                     const Request& request,
                                     const Candidate& candidate) {
  Assignment assignment;
  assignment.request = request.id;
  assignment.server = candidate.server;
  assignment.model = candidate.model;
  if (candidate.server == request.covering_server) {
    assignment.decision = Decision::Local;
  } else {
    assignment.decision = instance.is_cloud(candidate.server)
                              ? Decision::OffloadCloud
                              : Decision::OffloadEdge;
  }
  assignment.accuracy = candidate.accuracy;
  assignment.completion_ms = candidate.completion_ms;
  assignment.us = candidate.us;
  return assignment;
}

Schedule greedy_schedule(const ProblemInstance& instance, bool relax_compute,
                         bool relax_comm) {
  CapacityState state(instance, relax_compute, relax_comm);
  std::vector<Assignment> assignments;
  assignments.reserve(instance.requests.size());
  for (const Request& request : instance.requests) {
    std::vector<Candidate> candidates = candidate_pairs(instance, request);
    sort_candidates(candidates, request.covering_server);
    bool assigned = false;
    for (const Candidate& candidate : candidates) {
      if (is_candidate(instance, request, candidate.server, candidate.model,
                       state)) {
        state.consume(instance, request, candidate.server, candidate.model);
        assignments.push_back(
            assignment_from_candidate(instance, request, candidate));
        assigned = true;
        break;
      }
    }
    if (!assigned) {
      assignments.push_back(make_drop(request.id));
    }
  }
  return finalize_schedule(instance, std::move(assignments), relax_compute,
                           relax_comm);
}

// Restricted greedy used by offload-all / local-all: same selection rule but
// only over servers accepted by the filter.
template <typename ServerFilter>
Schedule filtered_greedy(const ProblemInstance& instance,
                         ServerFilter&& accept_server) {
  CapacityState state(instance);
  std::vector<Assignment> assignments;
  assignments.reserve(instance.requests.size());
  for (const Request& request : instance.requests) {
    std::vector<Candidate> candidates = candidate_pairs(instance, request);
    std::erase_if(candidates, [&](const Candidate& candidate) {
      return !accept_server(request, candidate.server);
    });
    sort_candidates(candidates, request.covering_server);
    bool assigned = false;
    for (const Candidate& candidate : candidates) {
      if (is_candidate(instance, request, candidate.server, candidate.model,
                       state)) {
        state.consume(instance, request, candidate.server, candidate.model);
        assignments.push_back(
            assignment_from_candidate(instance, request, candidate));
        assigned = true;
        break;
      }
    }
    if (!assigned) {
      assignments.push_back(make_drop(request.id));
    }
  }
  return finalize_schedule(instance, std::move(assignments));
}

}  // namespace

Schedule gus(const ProblemInstance& instance) {
  return greedy_schedule(instance, false, false);
}

Schedule happy_computation(const ProblemInstance& instance) {
  return greedy_schedule(instance, true, false);
}

Schedule happy_communication(const ProblemInstance& instance) {
  return greedy_schedule(instance, false, true);
}

Schedule offload_all(const ProblemInstance& instance) {
  return filtered_greedy(instance, [&](const Request&, int server) {
    return instance.is_cloud(server);
  });
}

Schedule local_all(const ProblemInstance& instance) {
  return filtered_greedy(instance, [](const Request& request, int server) {
    return server == request.covering_server;
  });
}

Schedule random_assignment(const ProblemInstance& instance,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CapacityState state(instance);
  std::vector<Assignment> assignments;
  assignments.reserve(instance.requests.size());

  for (const Request& request : instance.requests) {
    std::vector<Candidate> candidates = candidate_pairs(instance, request);
    if (instance.mode == Mode::Strict) {
      std::erase_if(candidates, [&](const Candidate& candidate) {
        return candidate.accuracy < request.min_accuracy ||
               candidate.completion_ms > request.max_completion_ms;
      });
    }
    // Servers with at least one threshold-passing model are eligible; the
    // draw is uniform over them. The chosen server must then also have the
    // capacity to serve, otherwise the request is dropped on the spot.
    // Candidates come out server-ordered, so adjacent dedup suffices.
    std::vector<int> eligible;
    for (const Candidate& candidate : candidates) {
      if (eligible.empty() || eligible.back() != candidate.server) {
        eligible.push_back(candidate.server);
      }
    }
    if (eligible.empty()) {
      assignments.push_back(make_drop(request.id));
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    const int chosen = eligible[pick(rng)];

    const Candidate* best = nullptr;
    for (const Candidate& candidate : candidates) {
      if (candidate.server != chosen) {
        continue;
      }
      if (!is_candidate(instance, request, candidate.server, candidate.model,
                        state)) {
        continue;
      }
      if (best == nullptr || candidate.us > best->us ||
          (candidate.us == best->us && candidate.model < best->model)) {
        best = &candidate;
      }
    }
    if (best == nullptr) {
      assignments.push_back(make_drop(request.id));
      continue;
    }
    state.consume(instance, request, best->server, best->model);
    assignments.push_back(assignment_from_candidate(instance, request, *best));
  }
  return finalize_schedule(instance, std::move(assignments));
}

namespace {

// Margin below the incumbent at which a branch may be pruned. Keeps floating
// point rounding in the bound from ever cutting off an equal-valued optimum,
// so exact_solve and brute_force agree bit-for-bit.
constexpr double kPruneMargin = 1e-9;

struct ExactOption {
  bool drop = false;
  int server = -1;
  int model = -1;
  double value = 0.0;  // US, or -drop_penalty for the drop option
  double compute_cost = 0.0;
  double comm_cost = 0.0;
  Candidate candidate;
};

struct ExactSearch {
  const ProblemInstance& instance;
  const std::vector<std::vector<ExactOption>>& options;
  const std::vector<double>& suffix_best;
  std::vector<double> remaining_compute;
  std::vector<double> remaining_comm;
  std::vector<int> choice;
  std::vector<int> best_choice;
  double best_sum = -std::numeric_limits<double>::infinity();
  bool has_best = false;
  std::int64_t nodes = 0;
  std::int64_t node_limit = 0;
  bool budget_exceeded = false;

  void run(std::size_t depth, double partial_sum) {
    if (budget_exceeded) {
      return;
    }
    if (depth == options.size()) {
      if (!has_best || partial_sum > best_sum) {
        best_sum = partial_sum;
        best_choice = choice;
        has_best = true;
      }
      return;
    }
    if (has_best &&
        partial_sum + suffix_best[depth] < best_sum - kPruneMargin) {
      return;
    }
    const Request& request = instance.requests[depth];
    const auto& opts = options[depth];
    for (std::size_t o = 0; o < opts.size(); ++o) {
      const ExactOption& option = opts[o];
      if (++nodes > node_limit) {
        budget_exceeded = true;
        return;
      }
      if (!option.drop) {
        if (option.compute_cost >
            remaining_compute[static_cast<std::size_t>(option.server)]) {
          continue;
        }
        const bool offload = option.server != request.covering_server;
        if (offload &&
            option.comm_cost >
                remaining_comm[static_cast<std::size_t>(request.covering_server)]) {
          continue;
        }
        remaining_compute[static_cast<std::size_t>(option.server)] -=
            option.compute_cost;
        if (offload) {
          remaining_comm[static_cast<std::size_t>(request.covering_server)] -=
              option.comm_cost;
        }
        choice[depth] = static_cast<int>(o);
        run(depth + 1, partial_sum + option.value);
        remaining_compute[static_cast<std::size_t>(option.server)] +=
            option.compute_cost;
        if (offload) {
          remaining_comm[static_cast<std::size_t>(request.covering_server)] +=
              option.comm_cost;
        }
      } else {
        choice[depth] = static_cast<int>(o);
        run(depth + 1, partial_sum + option.value);
      }
      if (budget_exceeded) {
        return;
      }
    }
  }
};

}  // namespace

ExactResult exact_solve(const ProblemInstance& instance,
                        const ExactLimits& limits) {
  const long long variables = static_cast<long long>(instance.num_requests()) *
                              instance.num_servers() *
                              instance.catalog.num_models();
  if (variables > limits.max_variables) {
    throw InstanceTooLargeError(
        "exact solver guard exceeded: |N|*|M|*|L| = " +
        std::to_string(variables) + " > " +
        std::to_string(limits.max_variables));
  }

  // Per-request option lists: threshold-feasible pairs plus drop, ordered by
  // objective contribution so good incumbents appear early.
  std::vector<std::vector<ExactOption>> options;
  options.reserve(instance.requests.size());
  for (const Request& request : instance.requests) {
    std::vector<ExactOption> opts;
    for (const Candidate& candidate : candidate_pairs(instance, request)) {
      if (instance.mode == Mode::Strict &&
          (candidate.accuracy < request.min_accuracy ||
           candidate.completion_ms > request.max_completion_ms)) {
        continue;
      }
      ExactOption option;
      option.server = candidate.server;
      option.model = candidate.model;
      option.value = candidate.us;
      option.compute_cost =
          instance.catalog.compute_cost(request.service, candidate.model);
      option.comm_cost =
          instance.catalog.comm_cost(request.service, candidate.model);
      option.candidate = candidate;
      opts.push_back(option);
    }
    ExactOption drop;
    drop.drop = true;
    drop.value = -instance.drop_penalty;
    opts.push_back(drop);
    std::sort(opts.begin(), opts.end(),
              [](const ExactOption& a, const ExactOption& b) {
                if (a.value != b.value) {
                  return a.value > b.value;
                }
                if (a.drop != b.drop) {
                  return b.drop;  // try serving before dropping on ties
                }
                if (a.server != b.server) {
                  return a.server < b.server;
                }
                return a.model < b.model;
              });
    options.push_back(std::move(opts));
  }

  // Admissible bound: each remaining request contributes at most its best
  // option value (capacities only remove options).
  std::vector<double> suffix_best(options.size() + 1, 0.0);
  for (std::size_t i = options.size(); i-- > 0;) {
    suffix_best[i] = suffix_best[i + 1] + options[i].front().value;
  }

  ExactSearch search{instance, options, suffix_best, {}, {}, {}, {}};
  search.remaining_compute.reserve(instance.servers.size());
  search.remaining_comm.reserve(instance.servers.size());
  for (const Server& server : instance.servers) {
    search.remaining_compute.push_back(server.compute_capacity);
    search.remaining_comm.push_back(server.comm_capacity);
  }
  search.choice.assign(options.size(), -1);
  search.node_limit = limits.max_nodes;
  search.run(0, 0.0);

  ExactResult result;
  result.nodes_explored = search.nodes;
  result.proven_optimal = !search.budget_exceeded;
  std::vector<Assignment> assignments;
  assignments.reserve(instance.requests.size());
  for (std::size_t i = 0; i < instance.requests.size(); ++i) {
    if (!search.has_best) {
      // Budget ran out before the first complete descent.
      assignments.push_back(make_drop(instance.requests[i].id));
      continue;
    }
    const ExactOption& option =
        options[i][static_cast<std::size_t>(search.best_choice[i])];
    if (option.drop) {
      assignments.push_back(make_drop(instance.requests[i].id));
    } else {
      assignments.push_back(assignment_from_candidate(
          instance, instance.requests[i], option.candidate));
    }
  }
  result.schedule = finalize_schedule(instance, std::move(assignments));
  return result;
}

namespace {

struct BruteSearch {
  const ProblemInstance& instance;
  std::vector<double> remaining_compute;
  std::vector<double> remaining_comm;
  std::vector<Assignment> current;
  std::vector<Assignment> best;
  double best_sum = -std::numeric_limits<double>::infinity();
  bool has_best = false;

  void run(std::size_t depth, double partial_sum) {
    if (depth == instance.requests.size()) {
      if (!has_best || partial_sum > best_sum) {
        best_sum = partial_sum;
        best = current;
        has_best = true;
      }
      return;
    }
    const Request& request = instance.requests[depth];
    // Every (server, model) pair, checked directly against the constraints.
    for (const Server& server : instance.servers) {
      for (int model : server.hosted.models_for(request.service)) {
        if (server.id != request.covering_server &&
            !instance.delays.connected(request.covering_server, server.id)) {
          continue;
        }
        const double accuracy =
            instance.catalog.accuracy(request.service, model);
        const double completion =
            completion_time_ms(instance, request, server.id, model);
        if (instance.mode == Mode::Strict &&
            (accuracy < request.min_accuracy ||
             completion > request.max_completion_ms)) {
          continue;
        }
        const double v = instance.catalog.compute_cost(request.service, model);
        const double u = instance.catalog.comm_cost(request.service, model);
        const bool offload = server.id != request.covering_server;
        if (v > remaining_compute[static_cast<std::size_t>(server.id)]) {
          continue;
        }
        if (offload &&
            u > remaining_comm[static_cast<std::size_t>(request.covering_server)]) {
          continue;
        }
        remaining_compute[static_cast<std::size_t>(server.id)] -= v;
        if (offload) {
          remaining_comm[static_cast<std::size_t>(request.covering_server)] -= u;
        }
        Assignment assignment;
        assignment.request = request.id;
        assignment.server = server.id;
        assignment.model = model;
        assignment.decision =
            offload ? (instance.is_cloud(server.id) ? Decision::OffloadCloud
                                                    : Decision::OffloadEdge)
                    : Decision::Local;
        assignment.accuracy = accuracy;
        assignment.completion_ms = completion;
        assignment.us =
            user_satisfaction(instance, request, accuracy, completion);
        current[depth] = assignment;
        run(depth + 1, partial_sum + assignment.us);
        remaining_compute[static_cast<std::size_t>(server.id)] += v;
        if (offload) {
          remaining_comm[static_cast<std::size_t>(request.covering_server)] += u;
        }
      }
    }
    current[depth] = make_drop(request.id);
    run(depth + 1, partial_sum - instance.drop_penalty);
  }
};

}  // namespace

Schedule brute_force(const ProblemInstance& instance) {
  const double domain = static_cast<double>(instance.num_servers()) *
                            instance.catalog.num_models() +
                        1.0;
  if (std::pow(domain, instance.num_requests()) > 1e7) {
    throw InstanceTooLargeError(
        "brute force guard exceeded: (|M|*|L|+1)^|N| > 1e7");
  }
  BruteSearch search{instance, {}, {}, {}, {}};
  for (const Server& server : instance.servers) {
    search.remaining_compute.push_back(server.compute_capacity);
    search.remaining_comm.push_back(server.comm_capacity);
  }
  search.current.assign(instance.requests.size(), Assignment{});
  search.run(0, 0.0);
  return finalize_schedule(instance, std::move(search.best));
}

}  // namespace edgesched
