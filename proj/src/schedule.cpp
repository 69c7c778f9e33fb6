#include "edgesched/schedule.hpp"

#include <cmath>
#include <sstream>

namespace edgesched {

const char* to_string(Decision decision) {
  switch (decision) {
    case Decision::Local:
      return "local";
    case Decision::OffloadEdge:
      return "offload_edge";
    case Decision::OffloadCloud:
      return "offload_cloud";
    case Decision::Drop:
      return "drop";
  }
  return "unknown";
}

Decision decision_from_string(std::string_view name) {
  if (name == "local") return Decision::Local;
  if (name == "offload_edge") return Decision::OffloadEdge;
  if (name == "offload_cloud") return Decision::OffloadCloud;
  if (name == "drop") return Decision::Drop;
  throw Error("unknown decision name: " + std::string(name));
}

Assignment make_assignment(const ProblemInstance& instance,
                           const Request& request, int server, int model) {
  Assignment assignment;
  assignment.request = request.id;
  assignment.server = server;
  assignment.model = model;
  if (server == request.covering_server) {
    assignment.decision = Decision::Local;
  } else {
    assignment.decision = instance.is_cloud(server) ? Decision::OffloadCloud
                                                    : Decision::OffloadEdge;
  }
  assignment.accuracy = instance.catalog.accuracy(request.service, model);
  assignment.completion_ms =
      completion_time_ms(instance, request, server, model);
  assignment.us = user_satisfaction(instance, request, assignment.accuracy,
                                    assignment.completion_ms);
  return assignment;
}

Assignment make_drop(int request) {
  Assignment assignment;
  assignment.request = request;
  assignment.decision = Decision::Drop;
  return assignment;
}

bool is_satisfied(const ProblemInstance& instance,
                  const Assignment& assignment) {
  if (assignment.decision == Decision::Drop) {
    return false;
  }
  const Request& request =
      instance.requests[static_cast<std::size_t>(assignment.request)];
  return assignment.accuracy >= request.min_accuracy &&
         assignment.completion_ms <= request.max_completion_ms;
}

Schedule finalize_schedule(const ProblemInstance& instance,
                           std::vector<Assignment> assignments,
                           bool relaxed_compute, bool relaxed_comm) {
  Schedule schedule;
  schedule.assignments = std::move(assignments);
  schedule.relaxed_compute = relaxed_compute;
  schedule.relaxed_comm = relaxed_comm;
  double sum = 0.0;
  for (const Assignment& assignment : schedule.assignments) {
    if (assignment.decision == Decision::Drop) {
      sum -= instance.drop_penalty;
    } else {
      sum += assignment.us;
    }
    if (is_satisfied(instance, assignment)) {
      ++schedule.satisfied_count;
    }
  }
  const int n = instance.num_requests();
  schedule.objective = n == 0 ? 0.0 : sum / n;
  return schedule;
}

namespace {

constexpr double kTolerance = 1e-9;

void check_assignment(const ProblemInstance& instance,
                      const Assignment& assignment,
                      std::vector<std::string>& violations) {
  std::ostringstream os;
  const Request& request =
      instance.requests[static_cast<std::size_t>(assignment.request)];

  if (assignment.decision == Decision::Drop) {
    if (assignment.server != -1 || assignment.model != -1) {
      os << "(2a) request " << assignment.request
         << ": dropped but carries a server/model";
      violations.push_back(os.str());
    }
    return;
  }

  if (assignment.server < 0 || assignment.server >= instance.num_servers()) {
    os << "(2f) request " << assignment.request << ": server index "
       << assignment.server << " out of range";
    violations.push_back(os.str());
    return;
  }
  const Server& server =
      instance.servers[static_cast<std::size_t>(assignment.server)];
  if (!server.hosted.contains(request.service, assignment.model)) {
    os << "(2f) request " << assignment.request << ": server "
       << assignment.server << " does not host (service " << request.service
       << ", model " << assignment.model << ")";
    violations.push_back(os.str());
    return;
  }

  Decision expected;
  if (assignment.server == request.covering_server) {
    expected = Decision::Local;
  } else {
    expected = instance.is_cloud(assignment.server) ? Decision::OffloadCloud
                                                    : Decision::OffloadEdge;
  }
  if (assignment.decision != expected) {
    os << "(2f) request " << assignment.request << ": decision "
       << to_string(assignment.decision) << " does not match server "
       << assignment.server;
    violations.push_back(os.str());
  }

  const double accuracy =
      instance.catalog.accuracy(request.service, assignment.model);
  const double completion = completion_time_ms(instance, request,
                                               assignment.server,
                                               assignment.model);
  const double us = user_satisfaction(instance, request, accuracy, completion);
  if (std::abs(accuracy - assignment.accuracy) > kTolerance ||
      std::abs(completion - assignment.completion_ms) > kTolerance ||
      std::abs(us - assignment.us) > kTolerance) {
    std::ostringstream oss;
    oss << "(consistency) request " << assignment.request
        << ": stored accuracy/completion/US do not match the model";
    violations.push_back(oss.str());
  }

  if (instance.mode == Mode::Strict) {
    if (accuracy < request.min_accuracy) {
      std::ostringstream oss;
      oss << "(2b) request " << assignment.request << ": accuracy " << accuracy
          << " below threshold " << request.min_accuracy;
      violations.push_back(oss.str());
    }
    if (completion > request.max_completion_ms) {
      std::ostringstream oss;
      oss << "(2c) request " << assignment.request << ": completion "
          << completion << " ms exceeds threshold "
          << request.max_completion_ms << " ms";
      violations.push_back(oss.str());
    }
  }
}

}  // namespace

std::vector<std::string> validate_schedule(const ProblemInstance& instance,
                                           const Schedule& schedule) {
  std::vector<std::string> violations;
  const int n = instance.num_requests();

  if (static_cast<int>(schedule.assignments.size()) != n) {
    violations.push_back("(2a) schedule must carry exactly one assignment per request");
    return violations;
  }
  for (int i = 0; i < n; ++i) {
    if (schedule.assignments[static_cast<std::size_t>(i)].request != i) {
      violations.push_back("(2a) assignment " + std::to_string(i) +
                           " is not aligned with its request index");
      return violations;
    }
  }

  for (const Assignment& assignment : schedule.assignments) {
    check_assignment(instance, assignment, violations);
  }

  // Capacity constraints, unless the producing algorithm relaxed them.
  std::vector<double> compute_load(static_cast<std::size_t>(instance.num_servers()), 0.0);
  std::vector<double> comm_load(static_cast<std::size_t>(instance.num_servers()), 0.0);
  for (const Assignment& assignment : schedule.assignments) {
    if (assignment.decision == Decision::Drop || assignment.server < 0 ||
        assignment.server >= instance.num_servers()) {
      continue;
    }
    const Request& request =
        instance.requests[static_cast<std::size_t>(assignment.request)];
    compute_load[static_cast<std::size_t>(assignment.server)] +=
        instance.catalog.compute_cost(request.service, assignment.model);
    if (assignment.server != request.covering_server) {
      comm_load[static_cast<std::size_t>(request.covering_server)] +=
          instance.catalog.comm_cost(request.service, assignment.model);
    }
  }
  for (int j = 0; j < instance.num_servers(); ++j) {
    const Server& server = instance.servers[static_cast<std::size_t>(j)];
    if (!schedule.relaxed_compute &&
        compute_load[static_cast<std::size_t>(j)] >
            server.compute_capacity + kTolerance) {
      std::ostringstream os;
      os << "(2d) server " << j << ": compute load "
         << compute_load[static_cast<std::size_t>(j)] << " exceeds capacity "
         << server.compute_capacity;
      violations.push_back(os.str());
    }
    if (!schedule.relaxed_comm && comm_load[static_cast<std::size_t>(j)] >
                                      server.comm_capacity + kTolerance) {
      std::ostringstream os;
      os << "(2e) server " << j << ": comm load "
         << comm_load[static_cast<std::size_t>(j)] << " exceeds capacity "
         << server.comm_capacity;
      violations.push_back(os.str());
    }
  }

  // Objective and satisfied count must match a recomputation.
  Schedule recomputed = finalize_schedule(instance, schedule.assignments,
                                          schedule.relaxed_compute,
                                          schedule.relaxed_comm);
  if (std::abs(recomputed.objective - schedule.objective) > kTolerance) {
    violations.push_back("(objective) stored objective does not match Eq. (2) recomputation");
  }
  if (recomputed.satisfied_count != schedule.satisfied_count) {
    violations.push_back("(objective) stored satisfied count does not match recomputation");
  }
  return violations;
}

}  // namespace edgesched
