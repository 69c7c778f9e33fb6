// Command-line front end: Monte-Carlo simulation, parameter sweeps, the
// framed testbed-style simulation, single-instance solves, schedule
// validation and GUS-vs-exact comparison.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgesched/report.hpp"
#include "edgesched/rng.hpp"
#include "edgesched/scenario.hpp"
#include "edgesched/schedulers.hpp"
#include "edgesched/sim.hpp"

namespace {

using namespace edgesched;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitTooLarge = 3;

int thread_cap_from_env() {
  const char* raw = std::getenv("EDGESCHED_THREADS");
  if (raw == nullptr || *raw == '\0') {
    return 0;  // auto
  }
  try {
    return std::max(0, std::stoi(raw));
  } catch (const std::exception&) {
    return 0;
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw Error("cannot open output file: " + out_path);
  }
  out << text;
  if (!out) {
    throw Error("failed writing output file: " + out_path);
  }
}

std::string format6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

struct CommonOptions {
  std::string config_name = "paper_default";
  std::uint64_t seed = 1;
  std::string mode_override;
  std::string out_path = "-";
  std::string algs = "gus";
};

void add_common(CLI::App* cmd, CommonOptions& options, bool with_algs = true) {
  cmd->add_option("--config", options.config_name,
                  "Builtin profile (paper_default, testbed, small) or JSON file");
  cmd->add_option("--seed", options.seed, "Base random seed");
  cmd->add_option("--mode", options.mode_override,
                  "Override the scenario mode (strict|soft)")
      ->check(CLI::IsMember({"strict", "soft"}));
  cmd->add_option("--out", options.out_path, "Output path ('-' = stdout)");
  if (with_algs) {
    cmd->add_option("--algs", options.algs,
                    "Comma-separated algorithms (gus, random, offload-all, "
                    "local-all, happy-comp, happy-comm, exact, brute-force)");
  }
}

ScenarioConfig resolve_config(const CommonOptions& options) {
  ScenarioConfig config = load_config(options.config_name);
  if (options.mode_override == "strict") {
    config.mode = Mode::Strict;
  } else if (options.mode_override == "soft") {
    config.mode = Mode::Soft;
  }
  return config;
}

void print_run_summary(const std::vector<RunResult>& results,
                       const std::vector<Algorithm>& algorithms, int runs) {
  for (const Algorithm algorithm : algorithms) {
    const std::string name = algorithm_name(algorithm);
    double satisfied = 0.0;
    double objective = 0.0;
    for (const RunResult& r : results) {
      if (r.algorithm == name) {
        satisfied += r.satisfied_pct;
        objective += r.mean_us;
      }
    }
    std::cerr << name << ": mean satisfied " << format6(100.0 * satisfied / runs)
              << "% | mean US " << format6(objective / runs) << '\n';
  }
}

int cmd_simulate(const CommonOptions& options, int runs) {
  const ScenarioConfig config = resolve_config(options);
  const std::vector<Algorithm> algorithms = parse_algorithm_list(options.algs);
  const std::vector<RunResult> results = monte_carlo(
      config, algorithms, runs, options.seed, thread_cap_from_env());
  emit(results_to_csv(results), options.out_path);
  print_run_summary(results, algorithms, runs);
  return kExitOk;
}

int cmd_sweep(const CommonOptions& options, const std::string& sweep_arg,
              int runs) {
  const auto eq = sweep_arg.find('=');
  if (eq == std::string::npos) {
    throw InvalidConfigError("--sweep expects PARAM=v1,v2,...");
  }
  const std::string param_name = sweep_arg.substr(0, eq);
  const auto parameter = sweep_parameter_from_name(param_name);
  if (!parameter) {
    throw InvalidConfigError("unknown sweep parameter: " + param_name);
  }
  SweepSpec spec;
  spec.parameter = *parameter;
  std::istringstream values(sweep_arg.substr(eq + 1));
  std::string token;
  while (std::getline(values, token, ',')) {
    if (!token.empty()) {
      spec.values.push_back(std::stod(token));
    }
  }
  spec.runs_per_point = runs;
  spec.algorithms = parse_algorithm_list(options.algs);

  const ScenarioConfig config = resolve_config(options);
  const std::vector<SweepPoint> points =
      sweep(spec, config, options.seed, thread_cap_from_env());
  emit(sweep_to_csv(points, spec.parameter), options.out_path);
  return kExitOk;
}

int cmd_framed(const CommonOptions& options, const FramedParams& params) {
  const ScenarioConfig config = resolve_config(options);
  const std::vector<Algorithm> algorithms = parse_algorithm_list(options.algs);
  const FramedOutput output =
      framed_simulation(config, params, algorithms, options.seed);
  emit(results_to_csv(output.per_frame), options.out_path);
  for (const RunResult& r : output.aggregate) {
    std::cerr << r.algorithm << ": " << r.n_requests << " arrivals | satisfied "
              << format6(100.0 * r.satisfied_pct) << "% | local "
              << format6(100.0 * r.local_pct) << "% | cloud "
              << format6(100.0 * r.offload_cloud_pct) << "% | edge "
              << format6(100.0 * r.offload_edge_pct) << "% | dropped "
              << format6(100.0 * r.dropped_pct) << "%\n";
  }
  return kExitOk;
}

int cmd_solve(const CommonOptions& options, bool save_schedule) {
  const ScenarioConfig config = resolve_config(options);
  const std::vector<Algorithm> algorithms = parse_algorithm_list(options.algs);
  if (save_schedule && algorithms.size() != 1) {
    throw Error("saving a schedule requires exactly one algorithm");
  }
  const ProblemInstance instance = generate_instance(config, options.seed);

  std::ostringstream os;
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    const Algorithm algorithm = algorithms[a];
    const Schedule schedule = run_algorithm(
        instance, algorithm, derive_seed(options.seed, 1000 + a));
    os << "algorithm: " << algorithm_name(algorithm) << '\n';
    os << "objective: " << format6(schedule.objective) << '\n';
    os << "satisfied: " << schedule.satisfied_count << " / "
       << instance.num_requests() << '\n';
    for (const Assignment& assignment : schedule.assignments) {
      os << "  request " << assignment.request << ": "
         << to_string(assignment.decision);
      if (assignment.decision != Decision::Drop) {
        os << " server=" << assignment.server << " model=" << assignment.model
           << " accuracy=" << format6(assignment.accuracy)
           << " completion_ms=" << format6(assignment.completion_ms)
           << " us=" << format6(assignment.us);
      }
      os << '\n';
    }
    if (save_schedule) {
      SavedSchedule saved;
      saved.config = config;
      saved.seed = options.seed;
      saved.algorithm = algorithm_name(algorithm);
      saved.schedule = schedule;
      emit(schedule_to_string(saved), options.out_path);
    }
  }
  if (save_schedule) {
    std::cerr << os.str();
  } else {
    emit(os.str(), options.out_path);
  }
  return kExitOk;
}

int cmd_validate(const std::string& schedule_path) {
  std::ifstream in(schedule_path, std::ios::binary);
  if (!in) {
    throw Error("cannot read schedule file: " + schedule_path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const SavedSchedule saved = parse_schedule_string(buffer.str());

  const ProblemInstance instance =
      generate_instance(saved.config, saved.seed);
  const std::vector<std::string> violations =
      validate_schedule(instance, saved.schedule);
  if (violations.empty()) {
    std::cout << "schedule is feasible: " << saved.schedule.assignments.size()
              << " assignments, objective " << format6(saved.schedule.objective)
              << '\n';
    return kExitOk;
  }
  for (const std::string& violation : violations) {
    std::cout << "violation " << violation << '\n';
  }
  return kExitFailure;
}

int cmd_compare(const CommonOptions& options, int runs) {
  const ScenarioConfig config = resolve_config(options);
  const std::vector<Algorithm> algorithms = {
      Algorithm::Gus,       Algorithm::Random,    Algorithm::OffloadAll,
      Algorithm::LocalAll,  Algorithm::HappyComp, Algorithm::HappyComm,
  };

  struct Stats {
    double objective_sum = 0.0;
    double ratio_sum = 0.0;
    double min_ratio = 1.0;
    double satisfied_sum = 0.0;
  };
  std::vector<Stats> stats(algorithms.size());
  double exact_objective_sum = 0.0;
  int proven = 0;

  for (int run = 0; run < runs; ++run) {
    const std::uint64_t run_seed = derive_seed(options.seed, static_cast<std::uint64_t>(run));
    const ProblemInstance instance = generate_instance(config, run_seed);
    const ExactResult exact = exact_solve(instance);
    proven += exact.proven_optimal ? 1 : 0;
    exact_objective_sum += exact.schedule.objective;

    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      const Schedule schedule = run_algorithm(
          instance, algorithms[a], derive_seed(run_seed, 1000 + a));
      const double ratio = exact.schedule.objective > 0.0
                               ? schedule.objective / exact.schedule.objective
                               : 1.0;
      stats[a].objective_sum += schedule.objective;
      stats[a].ratio_sum += ratio;
      stats[a].min_ratio = std::min(stats[a].min_ratio, ratio);
      stats[a].satisfied_sum +=
          instance.num_requests() == 0
              ? 0.0
              : static_cast<double>(schedule.satisfied_count) /
                    instance.num_requests();
    }
  }

  std::ostringstream os;
  os << "instances: " << runs << ", exact optimality proven on " << proven
     << '\n';
  os << "algorithm,mean_objective,mean_ratio_vs_exact,min_ratio,mean_satisfied_pct\n";
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    os << algorithm_name(algorithms[a]) << ','
       << format6(stats[a].objective_sum / runs) << ','
       << format6(stats[a].ratio_sum / runs) << ','
       << format6(stats[a].min_ratio) << ','
       << format6(stats[a].satisfied_sum / runs) << '\n';
  }
  os << "exact," << format6(exact_objective_sum / runs)
     << ",1.000000,1.000000,-\n";
  os << "mean(US_gus / US_exact) = " << format6(stats[0].ratio_sum / runs)
     << '\n';
  emit(os.str(), options.out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accuracy/delay-aware request scheduling simulator for "
               "edge-cloud systems"};
  app.require_subcommand(1);

  CommonOptions simulate_options;
  int simulate_runs = 100;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo runs of the selected algorithms");
  add_common(simulate, simulate_options);
  simulate->add_option("--runs", simulate_runs, "Monte-Carlo runs");

  CommonOptions sweep_options;
  int sweep_runs = 100;
  std::string sweep_arg;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Parameter sweep with aggregated results");
  add_common(sweep_cmd, sweep_options);
  sweep_cmd->add_option("--runs", sweep_runs, "Runs per sweep point");
  sweep_cmd->add_option("--sweep", sweep_arg, "PARAM=v1,v2,... (one of "
                        "requested_delay_mean, requested_accuracy_mean, "
                        "n_requests, queue_delay_max)")
      ->required();

  CommonOptions framed_options;
  FramedParams framed_params;
  framed_params.frames = 20;
  framed_params.arrival_rate_per_s = 1.0;
  CLI::App* framed = app.add_subcommand(
      "framed", "Time-framed simulation with admission queues");
  add_common(framed, framed_options);
  framed->add_option("--frames", framed_params.frames, "Number of frames");
  framed->add_option("--frame-len-ms", framed_params.frame_len_ms,
                     "Frame length in milliseconds");
  framed->add_option("--queue-cap", framed_params.queue_cap,
                     "Admission queue capacity");
  framed->add_option("--arrival-rate", framed_params.arrival_rate_per_s,
                     "Arrivals per second per edge server");
  framed->add_option("--noise-sigma", framed_params.bandwidth_noise_sigma,
                     "Lognormal sigma of bandwidth observations");

  CommonOptions solve_options;
  CLI::App* solve = app.add_subcommand(
      "solve", "Solve a single generated instance and print the schedule");
  add_common(solve, solve_options);
  bool solve_save = false;
  solve->add_flag("--save-schedule", solve_save,
                  "Write the schedule as JSON to --out instead of text");

  std::string schedule_path;
  CLI::App* validate =
      app.add_subcommand("validate", "Re-check a saved schedule");
  validate->add_option("--schedule", schedule_path, "Schedule JSON file")
      ->required();

  CommonOptions compare_options;
  int compare_runs = 100;
  CLI::App* compare = app.add_subcommand(
      "compare", "GUS and baselines against the exact optimum");
  add_common(compare, compare_options, /*with_algs=*/false);
  compare->add_option("--runs", compare_runs, "Instances to compare on");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(simulate_options, simulate_runs);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_options, sweep_arg, sweep_runs);
    }
    if (framed->parsed()) {
      return cmd_framed(framed_options, framed_params);
    }
    if (solve->parsed()) {
      return cmd_solve(solve_options, solve_save);
    }
    if (validate->parsed()) {
      return cmd_validate(schedule_path);
    }
    if (compare->parsed()) {
      return cmd_compare(compare_options, compare_runs);
    }
  } catch (const InvalidConfigError& error) {
    std::cerr << "config error: " << error.what() << '\n';
    return kExitBadConfig;
  } catch (const InstanceTooLargeError& error) {
    std::cerr << "instance too large: " << error.what() << '\n';
    return kExitTooLarge;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
