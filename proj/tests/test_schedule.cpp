#include <random>

#include <doctest.h>

#include "edgesched/schedule.hpp"
#include "edgesched/schedulers.hpp"
#include "support/fuzz.hpp"
#include "support/testutil.hpp"

using namespace edgesched;
using edgesched::testing::fuzz_instance;
using edgesched::testing::make_request;
using edgesched::testing::make_simple;

namespace {

ProblemInstance two_request_instance() {
  ProblemInstance instance = make_simple();
  instance.requests.push_back(make_request(0, 0, 0, 0.5, 5000.0, 10.0));
  instance.requests.push_back(make_request(1, 0, 0, 0.5, 5000.0, 10.0));
  return instance;
}

}  // namespace

TEST_CASE("finalize_schedule averages served US over all requests") {
  ProblemInstance instance = two_request_instance();
  std::vector<Assignment> assignments;
  assignments.push_back(make_assignment(instance, instance.requests[0], 0, 0));
  assignments.push_back(make_drop(1));
  const double us = assignments[0].us;

  Schedule schedule = finalize_schedule(instance, assignments);
  CHECK(schedule.objective == doctest::Approx(us / 2.0).epsilon(1e-12));
  CHECK(schedule.satisfied_count == 1);

  // A dropped request contributes exactly zero without a penalty flag.
  ProblemInstance penalized = instance;
  penalized.drop_penalty = 0.25;
  Schedule with_penalty = finalize_schedule(penalized, assignments);
  CHECK(with_penalty.objective ==
        doctest::Approx((us - 0.25) / 2.0).epsilon(1e-12));
}

TEST_CASE("validator accepts greedy output on fuzzed instances") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance instance = fuzz_instance(rng);
    const Schedule schedule = gus(instance);
    const auto violations = validate_schedule(instance, schedule);
    CAPTURE(trial);
    CHECK(violations.empty());
  }
}

TEST_CASE("validator names the violated constraint") {
  ProblemInstance instance = two_request_instance();
  instance.servers[0].compute_capacity = 1.0;
  instance.servers[0].comm_capacity = 0.0;

  SUBCASE("(2d) compute capacity exceeded") {
    std::vector<Assignment> assignments;
    assignments.push_back(make_assignment(instance, instance.requests[0], 0, 0));
    assignments.push_back(make_assignment(instance, instance.requests[1], 0, 0));
    Schedule schedule = finalize_schedule(instance, assignments);
    const auto violations = validate_schedule(instance, schedule);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].find("(2d)") != std::string::npos);
  }

  SUBCASE("(2e) comm capacity exceeded") {
    std::vector<Assignment> assignments;
    assignments.push_back(make_assignment(instance, instance.requests[0], 1, 0));
    assignments.push_back(make_drop(1));
    Schedule schedule = finalize_schedule(instance, assignments);
    const auto violations = validate_schedule(instance, schedule);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].find("(2e)") != std::string::npos);
  }

  SUBCASE("(2b) accuracy threshold violated") {
    ProblemInstance strict = two_request_instance();
    std::vector<Assignment> assignments;
    assignments.push_back(make_assignment(strict, strict.requests[0], 0, 0));
    assignments.push_back(make_drop(1));
    strict.requests[0].min_accuracy = 0.99;  // corrupt after assignment
    Schedule schedule = finalize_schedule(strict, assignments);
    const auto violations = validate_schedule(strict, schedule);
    REQUIRE_FALSE(violations.empty());
    bool found = false;
    for (const auto& v : violations) {
      if (v.find("(2b)") != std::string::npos) {
        found = true;
      }
    }
    CHECK(found);
  }

  SUBCASE("(2c) delay threshold violated") {
    ProblemInstance strict = two_request_instance();
    std::vector<Assignment> assignments;
    assignments.push_back(make_assignment(strict, strict.requests[0], 0, 0));
    assignments.push_back(make_drop(1));
    strict.requests[0].max_completion_ms = 100.0;
    Schedule schedule = finalize_schedule(strict, assignments);
    const auto violations = validate_schedule(strict, schedule);
    bool found = false;
    for (const auto& v : violations) {
      if (v.find("(2c)") != std::string::npos) {
        found = true;
      }
    }
    CHECK(found);
  }

  SUBCASE("(2a) misaligned assignments") {
    std::vector<Assignment> assignments;
    assignments.push_back(make_drop(1));
    assignments.push_back(make_drop(0));
    Schedule schedule;
    schedule.assignments = assignments;
    const auto violations = validate_schedule(instance, schedule);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].find("(2a)") != std::string::npos);
  }

  SUBCASE("(2f) decision kind must match the server") {
    std::vector<Assignment> assignments;
    assignments.push_back(make_assignment(instance, instance.requests[0], 0, 0));
    assignments.push_back(make_drop(1));
    assignments[0].decision = Decision::OffloadCloud;  // actually local
    Schedule schedule = finalize_schedule(instance, assignments);
    const auto violations = validate_schedule(instance, schedule);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].find("(2f)") != std::string::npos);
  }

  SUBCASE("objective mismatch is reported") {
    std::vector<Assignment> assignments;
    assignments.push_back(make_assignment(instance, instance.requests[0], 0, 0));
    assignments.push_back(make_drop(1));
    Schedule schedule = finalize_schedule(instance, assignments);
    schedule.objective += 0.5;
    const auto violations = validate_schedule(instance, schedule);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].find("objective") != std::string::npos);
  }
}

TEST_CASE("soft mode: satisfaction tracks thresholds, not assignment") {
  ProblemInstance instance = make_simple({.mode = Mode::Soft});
  instance.requests.push_back(make_request(0, 0, 0, 0.95, 100.0));
  std::vector<Assignment> assignments;
  assignments.push_back(make_assignment(instance, instance.requests[0], 0, 0));
  CHECK(assignments[0].us < 0.0);  // thresholds unmet, negative US

  Schedule schedule = finalize_schedule(instance, assignments);
  CHECK(schedule.satisfied_count == 0);
  CHECK(schedule.objective < 0.0);
  CHECK(validate_schedule(instance, schedule).empty());
}

TEST_CASE("relaxed schedules skip only the waived capacity constraint") {
  ProblemInstance instance = two_request_instance();
  instance.servers[0].compute_capacity = 1.0;
  std::vector<Assignment> assignments;
  assignments.push_back(make_assignment(instance, instance.requests[0], 0, 0));
  assignments.push_back(make_assignment(instance, instance.requests[1], 0, 0));

  Schedule strict = finalize_schedule(instance, assignments);
  CHECK_FALSE(validate_schedule(instance, strict).empty());

  Schedule relaxed = finalize_schedule(instance, assignments, true, false);
  CHECK(validate_schedule(instance, relaxed).empty());
}
