#include "edgesched/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace edgesched {

namespace {

using nlohmann::json;

std::string format6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

constexpr const char* kResultsHeader =
    "run,algorithm,n_requests,satisfied_pct,mean_us,dropped_pct,local_pct,"
    "offload_cloud_pct,offload_edge_pct";

void reject_unknown_fields(const json& object,
                           std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (item.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw InvalidConfigError("unknown field '" + item.key() + "' in " +
                               where);
    }
  }
}

json spec_to_json(const DistributionSpec& spec) {
  json j;
  switch (spec.kind) {
    case DistKind::Constant:
      j["kind"] = "constant";
      j["value"] = spec.value;
      break;
    case DistKind::Uniform:
      j["kind"] = "uniform";
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
    case DistKind::NormalTruncated:
      j["kind"] = "normal_truncated";
      j["mean"] = spec.mean;
      j["stddev"] = spec.stddev;
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
  }
  return j;
}

DistributionSpec spec_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) {
    throw InvalidConfigError(where + ": distribution spec must be an object with a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    reject_unknown_fields(j, {"kind", "value"}, where);
    return DistributionSpec::constant(j.at("value").get<double>());
  }
  if (kind == "uniform") {
    reject_unknown_fields(j, {"kind", "lo", "hi"}, where);
    return DistributionSpec::uniform(j.at("lo").get<double>(),
                                     j.at("hi").get<double>());
  }
  if (kind == "normal_truncated") {
    reject_unknown_fields(j, {"kind", "mean", "stddev", "lo", "hi"}, where);
    return DistributionSpec::normal_truncated(
        j.at("mean").get<double>(), j.at("stddev").get<double>(),
        j.at("lo").get<double>(), j.at("hi").get<double>());
  }
  throw InvalidConfigError(where + ": unknown distribution kind '" + kind + "'");
}

json class_to_json(const ServerClassProfile& profile) {
  json j;
  j["name"] = profile.name;
  j["count"] = profile.count;
  j["compute_capacity"] = profile.compute_capacity;
  j["comm_capacity"] = profile.comm_capacity;
  j["placement_slots"] = profile.placement_slots;
  j["proc_delay_spec"] = spec_to_json(profile.proc_delay_spec);
  return j;
}

ServerClassProfile class_from_json(const json& j, const std::string& where) {
  reject_unknown_fields(j,
                        {"name", "count", "compute_capacity", "comm_capacity",
                         "placement_slots", "proc_delay_spec"},
                        where);
  ServerClassProfile profile;
  profile.name = j.at("name").get<std::string>();
  profile.count = j.at("count").get<int>();
  profile.compute_capacity = j.at("compute_capacity").get<double>();
  profile.comm_capacity = j.at("comm_capacity").get<double>();
  profile.placement_slots = j.value("placement_slots", 0);
  profile.proc_delay_spec =
      spec_from_json(j.at("proc_delay_spec"), where + ".proc_delay_spec");
  return profile;
}

}  // namespace

std::string results_to_csv(std::vector<RunResult> results) {
  std::sort(results.begin(), results.end(),
            [](const RunResult& a, const RunResult& b) {
              if (a.run != b.run) {
                return a.run < b.run;
              }
              return a.algorithm < b.algorithm;
            });
  std::ostringstream os;
  os << kResultsHeader << '\n';
  for (const RunResult& r : results) {
    os << r.run << ',' << r.algorithm << ',' << r.n_requests << ','
       << format6(r.satisfied_pct) << ',' << format6(r.mean_us) << ','
       << format6(r.dropped_pct) << ',' << format6(r.local_pct) << ','
       << format6(r.offload_cloud_pct) << ',' << format6(r.offload_edge_pct)
       << '\n';
  }
  return os.str();
}

void write_results(const std::vector<RunResult>& results,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open output file: " + path);
  }
  out << results_to_csv(results);
  if (!out) {
    throw Error("failed writing output file: " + path);
  }
}

std::vector<RunResult> parse_results_csv(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line) || line != kResultsHeader) {
    throw Error("results CSV is missing the expected header");
  }
  std::vector<RunResult> results;
  while (std::getline(stream, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    RunResult r;
    auto next = [&]() -> std::string {
      if (!std::getline(fields, field, ',')) {
        throw Error("results CSV row has too few fields: " + line);
      }
      return field;
    };
    r.run = std::stoi(next());
    r.algorithm = next();
    r.n_requests = std::stoi(next());
    r.satisfied_pct = std::stod(next());
    r.mean_us = std::stod(next());
    r.dropped_pct = std::stod(next());
    r.local_pct = std::stod(next());
    r.offload_cloud_pct = std::stod(next());
    r.offload_edge_pct = std::stod(next());
    results.push_back(std::move(r));
  }
  return results;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points,
                         SweepParameter parameter) {
  std::ostringstream os;
  os << "parameter,value,algorithm,runs,satisfied_pct_mean,satisfied_pct_se,"
        "mean_us_mean,mean_us_se,dropped_pct_mean,local_pct_mean,"
        "offload_cloud_pct_mean,offload_edge_pct_mean\n";
  const std::string name = sweep_parameter_name(parameter);
  for (const SweepPoint& p : points) {
    os << name << ',' << format6(p.value) << ',' << p.algorithm << ','
       << p.runs << ',' << format6(p.satisfied_mean) << ','
       << format6(p.satisfied_se) << ',' << format6(p.mean_us_mean) << ','
       << format6(p.mean_us_se) << ',' << format6(p.dropped_mean) << ','
       << format6(p.local_mean) << ',' << format6(p.offload_cloud_mean) << ','
       << format6(p.offload_edge_mean) << '\n';
  }
  return os.str();
}

json config_to_json(const ScenarioConfig& config) {
  json j;
  j["version"] = 1;
  j["name"] = config.name;
  j["mode"] = config.mode == Mode::Strict ? "strict" : "soft";
  j["n_requests"] = config.n_requests;
  j["n_services"] = config.n_services;
  j["n_models"] = config.n_models;
  j["weight_accuracy"] = config.weight_accuracy;
  j["weight_time"] = config.weight_time;
  j["max_accuracy"] = config.max_accuracy;
  j["max_completion_ms"] = config.max_completion_ms;
  j["bandwidth_bytes_per_ms"] = config.bandwidth_bytes_per_ms;
  j["drop_penalty"] = config.drop_penalty;
  j["accuracy_spec"] = spec_to_json(config.accuracy_spec);
  j["delay_spec"] = spec_to_json(config.delay_spec);
  j["queue_delay_spec"] = spec_to_json(config.queue_delay_spec);
  j["payload_spec"] = spec_to_json(config.payload_spec);
  j["model_accuracy_spec"] = spec_to_json(config.model_accuracy_spec);
  j["compute_cost_spec"] = spec_to_json(config.compute_cost_spec);
  j["comm_cost_spec"] = spec_to_json(config.comm_cost_spec);
  j["edge_hosted_models"] = config.edge_hosted_models;
  json classes = json::array();
  for (const ServerClassProfile& profile : config.edge_classes) {
    classes.push_back(class_to_json(profile));
  }
  j["edge_classes"] = classes;
  j["cloud"] = class_to_json(config.cloud);
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    throw InvalidConfigError("config root must be a JSON object");
  }
  reject_unknown_fields(
      j,
      {"version", "name", "mode", "n_requests", "n_services", "n_models",
       "weight_accuracy", "weight_time", "max_accuracy", "max_completion_ms",
       "bandwidth_bytes_per_ms", "drop_penalty", "accuracy_spec", "delay_spec",
       "queue_delay_spec", "payload_spec", "model_accuracy_spec",
       "compute_cost_spec", "comm_cost_spec", "edge_hosted_models",
       "edge_classes", "cloud"},
      "config");
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != 1) {
    throw InvalidConfigError("config requires \"version\": 1");
  }

  ScenarioConfig config;
  config.name = j.value("name", std::string{});
  const std::string mode = j.value("mode", std::string("strict"));
  if (mode == "strict") {
    config.mode = Mode::Strict;
  } else if (mode == "soft") {
    config.mode = Mode::Soft;
  } else {
    throw InvalidConfigError("mode must be 'strict' or 'soft'");
  }
  config.n_requests = j.at("n_requests").get<int>();
  config.n_services = j.at("n_services").get<int>();
  config.n_models = j.at("n_models").get<int>();
  config.weight_accuracy = j.at("weight_accuracy").get<double>();
  config.weight_time = j.at("weight_time").get<double>();
  config.max_accuracy = j.at("max_accuracy").get<double>();
  config.max_completion_ms = j.at("max_completion_ms").get<double>();
  config.bandwidth_bytes_per_ms = j.at("bandwidth_bytes_per_ms").get<double>();
  config.drop_penalty = j.value("drop_penalty", 0.0);
  config.accuracy_spec = spec_from_json(j.at("accuracy_spec"), "accuracy_spec");
  config.delay_spec = spec_from_json(j.at("delay_spec"), "delay_spec");
  config.queue_delay_spec =
      spec_from_json(j.at("queue_delay_spec"), "queue_delay_spec");
  config.payload_spec = spec_from_json(j.at("payload_spec"), "payload_spec");
  config.model_accuracy_spec =
      spec_from_json(j.at("model_accuracy_spec"), "model_accuracy_spec");
  if (j.contains("compute_cost_spec")) {
    config.compute_cost_spec =
        spec_from_json(j.at("compute_cost_spec"), "compute_cost_spec");
  }
  if (j.contains("comm_cost_spec")) {
    config.comm_cost_spec =
        spec_from_json(j.at("comm_cost_spec"), "comm_cost_spec");
  }
  if (j.contains("edge_hosted_models")) {
    config.edge_hosted_models =
        j.at("edge_hosted_models").get<std::vector<int>>();
  }
  if (!j.contains("edge_classes") || !j.at("edge_classes").is_array()) {
    throw InvalidConfigError("config requires an 'edge_classes' array");
  }
  for (std::size_t c = 0; c < j.at("edge_classes").size(); ++c) {
    config.edge_classes.push_back(
        class_from_json(j.at("edge_classes").at(c),
                        "edge_classes[" + std::to_string(c) + "]"));
  }
  config.cloud = class_from_json(j.at("cloud"), "cloud");
  validate_config(config);
  return config;
}

std::string config_to_string(const ScenarioConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

ScenarioConfig parse_config_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& error) {
    throw InvalidConfigError(std::string("config is not valid JSON: ") +
                             error.what());
  }
  return config_from_json(j);
}

ScenarioConfig load_config(const std::string& path_or_name) {
  if (auto builtin = builtin_config(path_or_name)) {
    return *builtin;
  }
  std::ifstream in(path_or_name, std::ios::binary);
  if (!in) {
    throw InvalidConfigError("config '" + path_or_name +
                             "' is neither a builtin profile nor a readable file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_string(buffer.str());
}

std::string schedule_to_string(const SavedSchedule& saved) {
  json j;
  j["version"] = 1;
  j["config"] = config_to_json(saved.config);
  j["seed"] = saved.seed;
  j["algorithm"] = saved.algorithm;
  j["relaxed_compute"] = saved.schedule.relaxed_compute;
  j["relaxed_comm"] = saved.schedule.relaxed_comm;
  j["objective"] = saved.schedule.objective;
  j["satisfied_count"] = saved.schedule.satisfied_count;
  json assignments = json::array();
  for (const Assignment& assignment : saved.schedule.assignments) {
    json a;
    a["request"] = assignment.request;
    a["decision"] = to_string(assignment.decision);
    if (assignment.decision != Decision::Drop) {
      a["server"] = assignment.server;
      a["model"] = assignment.model;
      a["accuracy"] = assignment.accuracy;
      a["completion_ms"] = assignment.completion_ms;
      a["us"] = assignment.us;
    }
    assignments.push_back(std::move(a));
  }
  j["assignments"] = std::move(assignments);
  return j.dump(2) + "\n";
}

SavedSchedule parse_schedule_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& error) {
    throw Error(std::string("schedule is not valid JSON: ") + error.what());
  }
  reject_unknown_fields(j,
                        {"version", "config", "seed", "algorithm",
                         "relaxed_compute", "relaxed_comm", "objective",
                         "satisfied_count", "assignments"},
                        "schedule");
  if (j.value("version", 0) != 1) {
    throw Error("schedule requires \"version\": 1");
  }
  SavedSchedule saved;
  saved.config = config_from_json(j.at("config"));
  saved.seed = j.at("seed").get<std::uint64_t>();
  saved.algorithm = j.value("algorithm", std::string{});
  saved.schedule.relaxed_compute = j.value("relaxed_compute", false);
  saved.schedule.relaxed_comm = j.value("relaxed_comm", false);
  saved.schedule.objective = j.at("objective").get<double>();
  saved.schedule.satisfied_count = j.at("satisfied_count").get<int>();
  for (const json& a : j.at("assignments")) {
    Assignment assignment;
    assignment.request = a.at("request").get<int>();
    assignment.decision =
        decision_from_string(a.at("decision").get<std::string>());
    if (assignment.decision != Decision::Drop) {
      assignment.server = a.at("server").get<int>();
      assignment.model = a.at("model").get<int>();
      assignment.accuracy = a.at("accuracy").get<double>();
      assignment.completion_ms = a.at("completion_ms").get<double>();
      assignment.us = a.at("us").get<double>();
    }
    saved.schedule.assignments.push_back(assignment);
  }
  return saved;
}

json instance_to_json(const ProblemInstance& instance) {
  json j;
  j["max_accuracy"] = instance.max_accuracy;
  j["max_completion_ms"] = instance.max_completion_ms;
  j["mode"] = instance.mode == Mode::Strict ? "strict" : "soft";
  j["drop_penalty"] = instance.drop_penalty;

  json requests = json::array();
  for (const Request& request : instance.requests) {
    json r;
    r["id"] = request.id;
    r["service"] = request.service;
    r["min_accuracy"] = request.min_accuracy;
    r["max_completion_ms"] = request.max_completion_ms;
    r["weight_accuracy"] = request.weight_accuracy;
    r["weight_time"] = request.weight_time;
    r["covering_server"] = request.covering_server;
    r["payload_bytes"] = request.payload_bytes;
    r["queue_delay_ms"] = request.queue_delay_ms;
    requests.push_back(std::move(r));
  }
  j["requests"] = std::move(requests);

  json servers = json::array();
  for (const Server& server : instance.servers) {
    json s;
    s["id"] = server.id;
    s["kind"] = server.kind == ServerKind::Edge ? "edge" : "cloud";
    s["compute_capacity"] = server.compute_capacity;
    s["comm_capacity"] = server.comm_capacity;
    s["perf_class"] = server.perf_class;
    json hosted = json::array();
    for (int k = 0; k < server.hosted.num_services(); ++k) {
      for (int l : server.hosted.models_for(k)) {
        hosted.push_back(json::array({k, l}));
      }
    }
    s["hosted"] = std::move(hosted);
    servers.push_back(std::move(s));
  }
  j["servers"] = std::move(servers);

  json catalog;
  catalog["classes"] = instance.catalog.class_names();
  json entries = json::array();
  for (int k = 0; k < instance.catalog.num_services(); ++k) {
    for (int l = 0; l < instance.catalog.num_models(); ++l) {
      json e;
      e["service"] = k;
      e["model"] = l;
      e["accuracy"] = instance.catalog.accuracy(k, l);
      e["compute_cost"] = instance.catalog.compute_cost(k, l);
      e["comm_cost"] = instance.catalog.comm_cost(k, l);
      json delays = json::array();
      for (int c = 0; c < instance.catalog.num_classes(); ++c) {
        delays.push_back(instance.catalog.proc_delay_ms(c, k, l));
      }
      e["proc_delay_ms"] = std::move(delays);
      entries.push_back(std::move(e));
    }
  }
  catalog["entries"] = std::move(entries);
  j["catalog"] = std::move(catalog);

  json bandwidth = json::array();
  for (int from = 0; from < instance.num_servers(); ++from) {
    json row = json::array();
    for (int to = 0; to < instance.num_servers(); ++to) {
      row.push_back(from == to ? 0.0 : instance.delays.bandwidth(from, to));
    }
    bandwidth.push_back(std::move(row));
  }
  j["bandwidth"] = std::move(bandwidth);
  return j;
}

}  // namespace edgesched
