#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "edgesched/report.hpp"
#include "edgesched/scenario.hpp"

using namespace edgesched;

TEST_CASE("truncated normal draws stay in bounds and keep the mean") {
  DistributionSpec spec = DistributionSpec::normal_truncated(0.45, 0.10, 0.0, 1.0);
  std::mt19937_64 rng(1);
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double x = spec.draw(rng);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    sum += x;
  }
  const double mean = sum / draws;
  const double standard_error = 0.10 / std::sqrt(static_cast<double>(draws));
  CHECK(std::abs(mean - 0.45) <= 3.0 * standard_error);
}

TEST_CASE("uniform and constant specs behave") {
  std::mt19937_64 rng(2);
  DistributionSpec uniform = DistributionSpec::uniform(10.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform.draw(rng);
    CHECK(x >= 10.0);
    CHECK(x < 20.0);
  }
  DistributionSpec constant = DistributionSpec::constant(42.0);
  CHECK(constant.draw(rng) == 42.0);
}

TEST_CASE("paper default profile pins the published parameters") {
  const ScenarioConfig config = paper_default_profile();
  CHECK(config.n_requests == 100);
  CHECK(config.n_services == 100);
  CHECK(config.n_models == 10);
  CHECK(config.n_edge_servers() == 9);
  CHECK(config.n_cloud_servers() == 1);

  CHECK(config.accuracy_spec.kind == DistKind::NormalTruncated);
  CHECK(config.accuracy_spec.mean == 0.45);
  CHECK(config.accuracy_spec.stddev == 0.10);
  CHECK(config.accuracy_spec.lo == 0.0);
  CHECK(config.accuracy_spec.hi == 1.0);

  CHECK(config.queue_delay_spec.kind == DistKind::Uniform);
  CHECK(config.queue_delay_spec.lo == 0.0);
  CHECK(config.queue_delay_spec.hi == 50.0);

  CHECK(config.max_accuracy == 1.0);
  CHECK(config.max_completion_ms == 12000.0);
  CHECK(config.bandwidth_bytes_per_ms == 600.0);
  CHECK(config.weight_accuracy == 1.0);
  CHECK(config.weight_time == 1.0);

  for (const ServerClassProfile& profile : config.edge_classes) {
    CHECK(profile.proc_delay_spec.kind == DistKind::Uniform);
    CHECK(profile.proc_delay_spec.lo == 950.0);
    CHECK(profile.proc_delay_spec.hi == 1300.0);
  }
  CHECK(config.cloud.proc_delay_spec.kind == DistKind::Constant);
  CHECK(config.cloud.proc_delay_spec.value == 300.0);

  CHECK_NOTHROW(validate_config(config));
}

TEST_CASE("generated instances are deterministic per (config, seed)") {
  const ScenarioConfig config = small_profile();
  const ProblemInstance a = generate_instance(config, 12345);
  const ProblemInstance b = generate_instance(config, 12345);
  CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());
}

TEST_CASE("adjacent seeds give different instances") {
  const ScenarioConfig config = small_profile();
  std::set<std::string> images;
  const int seeds = 1000;
  for (int seed = 0; seed < seeds; ++seed) {
    images.insert(
        instance_to_json(generate_instance(config, static_cast<std::uint64_t>(seed)))
            .dump());
  }
  CHECK(images.size() == static_cast<std::size_t>(seeds));
}

TEST_CASE("placement respects slot budgets exactly") {
  ScenarioConfig config = small_profile();
  config.edge_classes[0].placement_slots = 2;
  config.edge_classes[1].placement_slots = 4;  // the whole 2x2 catalog
  const ProblemInstance instance = generate_instance(config, 7);
  CHECK(instance.servers[0].hosted.num_pairs() == 2);
  CHECK(instance.servers[1].hosted.num_pairs() == 4);
  // Cloud hosts everything.
  CHECK(instance.servers[2].hosted.num_pairs() == 4);
}

TEST_CASE("full slot budget hosts the whole catalog everywhere") {
  ScenarioConfig config = small_profile();
  for (ServerClassProfile& profile : config.edge_classes) {
    profile.placement_slots = config.n_services * config.n_models;
  }
  const ProblemInstance instance = generate_instance(config, 3);
  for (const Server& server : instance.servers) {
    CHECK(server.hosted.num_pairs() == config.n_services * config.n_models);
  }
}

TEST_CASE("model accuracy and processing delay grow with the model index") {
  const ScenarioConfig config = paper_default_profile();
  const ProblemInstance instance = generate_instance(config, 99);
  for (int k = 0; k < config.n_services; ++k) {
    for (int l = 1; l < config.n_models; ++l) {
      CHECK(instance.catalog.accuracy(k, l) >=
            instance.catalog.accuracy(k, l - 1));
      for (int c = 0; c < instance.catalog.num_classes(); ++c) {
        CHECK(instance.catalog.proc_delay_ms(c, k, l) >=
              instance.catalog.proc_delay_ms(c, k, l - 1));
      }
    }
  }
}

TEST_CASE("testbed profile: cloud model at least as accurate as edge model") {
  const ScenarioConfig config = testbed_profile();
  CHECK(config.n_edge_servers() == 2);
  CHECK(config.n_cloud_servers() == 1);
  CHECK(config.delay_spec.kind == DistKind::Constant);
  CHECK(config.delay_spec.value == 53000.0);
  CHECK(config.accuracy_spec.value == 0.5);
  for (const ServerClassProfile& profile : config.edge_classes) {
    CHECK(profile.compute_capacity == 3.0);
    CHECK(profile.comm_capacity == 10.0);
  }

  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const ProblemInstance instance = generate_instance(config, seed);
    // Edge servers host only model 0; the cloud also hosts model 1.
    for (const Server& server : instance.servers) {
      if (server.kind == ServerKind::Edge) {
        CHECK(server.hosted.contains(0, 0));
        CHECK_FALSE(server.hosted.contains(0, 1));
      } else {
        CHECK(server.hosted.num_pairs() == 2);
      }
    }
    CHECK(instance.catalog.accuracy(0, 1) >= instance.catalog.accuracy(0, 0));
  }
}

TEST_CASE("constant threshold specs have zero variance across seeds") {
  const ScenarioConfig config = testbed_profile();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance instance = generate_instance(config, seed);
    for (const Request& request : instance.requests) {
      CHECK(request.min_accuracy == 0.5);
      CHECK(request.max_completion_ms == 53000.0);
    }
  }
}

TEST_CASE("invalid configs are rejected with a diagnostic") {
  SUBCASE("slots beyond the placeable catalog") {
    ScenarioConfig config = small_profile();
    config.edge_classes[0].placement_slots = 100;
    CHECK_THROWS_AS(generate_instance(config, 1), InvalidConfigError);
  }
  SUBCASE("delay spec exceeding Max_cs") {
    ScenarioConfig config = small_profile();
    config.delay_spec = DistributionSpec::uniform(0.0, 1e9);
    CHECK_THROWS_AS(validate_config(config), InvalidConfigError);
  }
  SUBCASE("edge_hosted_models out of range") {
    ScenarioConfig config = testbed_profile();
    config.edge_hosted_models = {5};
    CHECK_THROWS_AS(validate_config(config), InvalidConfigError);
  }
  SUBCASE("no edge servers") {
    ScenarioConfig config = small_profile();
    for (ServerClassProfile& profile : config.edge_classes) {
      profile.count = 0;
    }
    CHECK_THROWS_AS(validate_config(config), InvalidConfigError);
  }
}

TEST_CASE("generated instances pass validation across seeds and profiles") {
  for (const char* name : {"paper_default", "testbed", "small"}) {
    const ScenarioConfig config = *builtin_config(name);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      CHECK_NOTHROW(generate_instance(config, seed));
    }
  }
}
