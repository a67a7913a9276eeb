// Nonmonotone higher-order Taylor outer loop.
//
// Each outer iteration solves the regularized model at x_k, doubling M until
// the candidate passes
//
//   f(y) <= R_k - Mtilde / (p+1)! |y - x_k|^{p+1},
//
// then relaxes M to max(M/2, M0) and updates the reference value
// R_{k+1} = (1 - u) R_k + u f(x_{k+1}).
#pragma once

#include "nhota/core.hpp"
#include "nhota/inner.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace nhota {

/// Reference-update weights u_{k+1}; either a constant or a callback of k+1.
struct USchedule {
  double constant = 0.5;
  std::function<double(int)> per_iteration;

  double at(int k) const { return per_iteration ? per_iteration(k) : constant; }
};

struct RunConfig {
  int p = 2;
  double M0 = 1e-2;
  double Mtilde = 1e-2;
  double theta = 0.1;
  USchedule u;
  double u_min = 1e-3;
  int max_outer = 1000;
  /// Stop once f(x_k) <= stop_f. -inf disables.
  double stop_f = -std::numeric_limits<double>::infinity();
  /// Stop once S_f(x_k) <= stop_stat. Negative disables.
  double stop_stat = -1.0;
  /// S_f(x_k) at or below this is reported as an exact stationary point.
  double stationary_floor = 1e-12;
  int max_doublings = 60;
  std::uint64_t seed = 0;
  InnerLimits inner;

  /// Throws std::invalid_argument on a bad combination.
  void validate() const;
};

enum class RunStatus {
  stationary,
  max_iters,
  stopped_by_criterion,
  line_search_failure,
  oracle_failure,
};

const char* to_string(RunStatus s);

/// State at iterate k. Step columns describe the step x_{k-1} -> x_k and
/// are zero on row 0.
struct TraceRow {
  int k = 0;
  double f = 0.0;
  double R = 0.0;
  double M = 0.0;  // M at acceptance of the step into x_k
  double step_norm = 0.0;
  double stationarity = 0.0;
  bool stationarity_is_bound = false;
  int inner_iters = 0;
  int backtracks = 0;
  double wall_millis = 0.0;
  double u = 1.0;  // weight used to form R_k
  bool certified = true;  // accepted step re-validated by certify
};

struct IterateTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::max_iters;
  std::string message;
  Vector x_final;
  double M_max = 0.0;
  int p = 2;
  double Mtilde = 0.0;
  double u_min = 0.0;

  std::vector<double> f_series() const;
  std::vector<double> stationarity_series() const;
};

double update_reference(double R, double f_new, double u);

bool accept_test(double R, double f_cand, double step_norm, double Mtilde, int p);

using AcceptTest = std::function<bool(double R, double f_cand, double step_norm, double Mtilde, int p)>;

struct StepResult {
  enum class Kind { accepted, stationary, line_search_failure, oracle_failure } kind;
  Vector y;
  Vector witness;
  double f_y = 0.0;
  double M_used = 0.0;
  int backtracks = 0;
  int inner_iters = 0;  // summed over all trials
  StepCertificate cert;
  bool at_rounding_floor = false;
};

/// Doubles M from M_in until a certified candidate passes the acceptance
/// test against the reference value R.
StepResult try_step(const CompositeProblem& problem, const ModelCenter& center, double R,
                    double M_in, const RunConfig& config, const AcceptTest& accept = accept_test);

/// Runs until a stopping rule fires. The stationarity column is the exact
/// S_f(x_k) when h supports it, otherwise |grad F(x_k) + p_k| for the prox
/// witness p_k in dh(x_k), flagged as a bound.
using RowObserver = std::function<void(const TraceRow&)>;

IterateTrace nhota_run(const CompositeProblem& problem, const Vector& x0, const RunConfig& config,
                       const RowObserver& on_row = {}, const AcceptTest& accept = accept_test);

}  // namespace nhota
