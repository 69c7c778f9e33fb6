#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edgesched/model.hpp"

// Scheduling decisions and the shared feasibility validator.

namespace edgesched {

enum class Decision { Local, OffloadEdge, OffloadCloud, Drop };

const char* to_string(Decision decision);
Decision decision_from_string(std::string_view name);

struct Assignment {
  int request = 0;
  Decision decision = Decision::Drop;
  int server = -1;  // -1 when dropped
  int model = -1;   // -1 when dropped
  double accuracy = 0.0;
  double completion_ms = 0.0;
  double us = 0.0;
};

// Builds a non-drop assignment, deriving the decision kind, accuracy,
// completion time and US from the instance.
Assignment make_assignment(const ProblemInstance& instance,
                           const Request& request, int server, int model);
Assignment make_drop(int request);

struct Schedule {
  std::vector<Assignment> assignments;  // exactly one per request, index-aligned
  double objective = 0.0;               // (1/|N|) * sum of US over served requests
  int satisfied_count = 0;
  // Set by the happy baselines: the producing algorithm intentionally waived
  // the corresponding capacity constraint, so the validator skips it.
  bool relaxed_compute = false;
  bool relaxed_comm = false;
};

// True when the assignment serves the request within its thresholds. In
// strict mode this is equivalent to not being dropped.
bool is_satisfied(const ProblemInstance& instance, const Assignment& assignment);

// Computes objective and satisfied_count. The objective sums contributions in
// request-index order; the exact and brute-force solvers accumulate their
// partial sums the same way so equal solutions produce bit-equal objectives.
Schedule finalize_schedule(const ProblemInstance& instance,
                           std::vector<Assignment> assignments,
                           bool relaxed_compute = false,
                           bool relaxed_comm = false);

// Literal re-check of the feasibility constraints plus internal consistency
// (decision kinds, hosting, stored accuracy/completion/US, objective).
// Returns one message per violation, each naming the constraint; empty means
// the schedule is valid. Threshold checks are skipped in soft mode and
// capacity checks are skipped for the dimension a schedule declares relaxed.
std::vector<std::string> validate_schedule(const ProblemInstance& instance,
                                           const Schedule& schedule);

}  // namespace edgesched
