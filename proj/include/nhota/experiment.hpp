// Experiment configuration (flat key=value files), problem construction and
// the file outputs of a run or a u-sweep.
#pragma once

#include "nhota/driver.hpp"
#include "nhota/problems.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhota {

/// Bad configuration text. `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class ProblemKind { phase_retrieval, diag_quad_l1 };

struct ExperimentConfig {
  RunConfig run;
  double u = 0.5;

  ProblemKind problem = ProblemKind::phase_retrieval;
  int n = 100;
  int m = 1000;
  std::uint64_t seed = 7;
  double lambda = 1e-5;
  double noise_scale = 1.0;
  double signal_variance = 0.5;
  std::optional<std::filesystem::path> data_dir;  // load phase-retrieval data instead of generating
  double d_min = 1.0;
  double d_max = 10.0;
  std::vector<double> d;  // explicit diag-quad data; generated when empty
  std::vector<double> c;
  std::vector<double> x0;  // explicit start; generated when empty

  std::filesystem::path output_dir = "nhota_out";
  std::vector<double> u_list{0.05, 0.25, 0.5, 0.75, 1.0};
  bool wall_clock = true;  // false writes 0 in wall_millis so traces are byte-reproducible

  ExperimentConfig();

  /// RunConfig with the constant weight `u` installed.
  RunConfig run_config(double u_value) const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, repeated
/// keys and malformed values raise ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);

/// NHOTA_SEED, when set, replaces the seed.
void apply_env_overrides(ExperimentConfig& config);

struct ProblemInstance {
  CompositeProblem problem;
  Vector x0;
  std::optional<PhaseRetrievalData> phase;
  std::optional<DiagQuadL1Data> diag;
  std::optional<double> f_star;
  std::uint64_t hash = 0;
};

ProblemInstance build_problem(const ExperimentConfig& config);

inline constexpr const char* kTraceHeader =
    "k,f,R,M,step_norm,stationarity,inner_iters,backtracks,wall_millis";

std::string format_trace_row(const TraceRow& row, bool wall_clock);

struct RunSummary {
  IterateTrace trace;
  std::map<std::string, std::string> fields;
};

/// Runs one configuration with weight u, streaming trace.csv (flushed per
/// row) and writing summary.txt into `dir`.
RunSummary run_to_directory(const ProblemInstance& instance, const ExperimentConfig& config,
                            double u, const std::filesystem::path& dir);

/// run_to_directory on config.output_dir with config.u.
RunSummary run_experiment(const ExperimentConfig& config);

struct SweepResult {
  std::vector<double> u_values;
  std::vector<RunSummary> runs;
};

/// One shared problem instance, one run per u (in parallel), per-u
/// directories u_<value>/ and a wide sweep.csv with columns
/// k, f_u<value>, stationarity_u<value>, ...
SweepResult sweep_u(const ExperimentConfig& config);

void write_summary(const std::filesystem::path& file, const std::map<std::string, std::string>& fields);

}  // namespace nhota
