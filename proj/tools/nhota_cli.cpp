// nhota: run, sweep, check and gen-data front end.
//
// Exit codes: 0 success, 1 configuration error, 2 run failure, 3 check-suite
// failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "nhota/check_suite.hpp"
#include "nhota/experiment.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRunFailure = 2;
constexpr int kCheckFailure = 3;

bool failed(const nhota::IterateTrace& t) {
  return t.status == nhota::RunStatus::line_search_failure || t.status == nhota::RunStatus::oracle_failure;
}

nhota::ExperimentConfig load(const std::string& path) {
  nhota::ExperimentConfig c = nhota::load_config(path);
  nhota::apply_env_overrides(c);
  return c;
}

int cmd_run(const std::string& path) {
  const auto config = load(path);
  const auto summary = nhota::run_experiment(config);
  for (const auto& [k, v] : summary.fields) std::cout << k << '=' << v << '\n';
  return failed(summary.trace) ? kRunFailure : 0;
}

int cmd_sweep(const std::string& path) {
  const auto config = load(path);
  const auto result = nhota::sweep_u(config);
  std::printf("%-6s %-22s %6s %14s %14s %10s\n", "u", "status", "iters", "final_f", "stationarity", "backtracks");
  bool any_failed = false;
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& tr = result.runs[i].trace;
    int backtracks = 0;
    for (const auto& r : tr.rows) backtracks += r.backtracks;
    std::printf("%-6g %-22s %6d %14.6e %14.6e %10d\n", result.u_values[i], nhota::to_string(tr.status),
                tr.rows.back().k, tr.rows.back().f, tr.rows.back().stationarity, backtracks);
    any_failed = any_failed || failed(tr);
  }
  std::printf("data_hash=%s\n", result.runs.front().fields.at("data_hash").c_str());
  return any_failed ? kRunFailure : 0;
}

int cmd_check(bool full) {
  int failures = 0;
  const auto results = nhota::run_check_suite(full ? nhota::CheckScale::full : nhota::CheckScale::quick,
                                              [&failures](const nhota::CheckResult& r) {
                                                std::printf("[%s] %-42s %s\n", r.passed ? "PASS" : "FAIL",
                                                            r.name.c_str(), r.detail.c_str());
                                                std::fflush(stdout);
                                                if (!r.passed) ++failures;
                                              });
  std::printf("%zu checks, %d failed\n", results.size(), failures);
  return failures == 0 ? 0 : kCheckFailure;
}

int cmd_gen_data(const std::string& path) {
  const auto config = load(path);
  if (config.problem != nhota::ProblemKind::phase_retrieval)
    throw nhota::ConfigError("gen-data writes phase-retrieval bundles only", 0);
  const auto data = nhota::gen_phase_retrieval_data(config.n, config.m, config.seed, config.noise_scale,
                                                    config.lambda, config.signal_variance);
  nhota::save_phase_retrieval(data, config.output_dir);
  std::printf("wrote %s (data_hash=%016llx)\n", config.output_dir.string().c_str(),
              static_cast<unsigned long long>(nhota::data_hash(data)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonmonotone higher-order Taylor method: experiments and checks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("config", config_path, "key=value config file")->required();
  auto* sweep = app.add_subcommand("sweep", "Run every u in u_list on shared data");
  sweep->add_option("config", config_path, "key=value config file")->required();
  bool full = false;
  auto* check = app.add_subcommand("check", "Run the invariant check suite");
  check->add_flag("--full", full, "Include the larger phase-retrieval experiment");
  auto* gen = app.add_subcommand("gen-data", "Write a phase-retrieval data bundle");
  gen->add_option("config", config_path, "key=value config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*sweep) return cmd_sweep(config_path);
    if (*check) return cmd_check(full);
    if (*gen) return cmd_gen_data(config_path);
  } catch (const nhota::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kRunFailure;
  }
  return 0;
}
