#include "nhota/driver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nhota/taylor.hpp"

namespace nhota {

namespace {
constexpr double kRoundingFloor = 1e-14;
}  // namespace

void RunConfig::validate() const {
  if (p != 1 && p != 2) throw std::invalid_argument("config: p must be 1 or 2");
  if (!(M0 > 0.0)) throw std::invalid_argument("config: M0 must be positive");
  if (!(Mtilde > 0.0)) throw std::invalid_argument("config: Mtilde must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("config: theta must be positive");
  if (!(u_min > 0.0 && u_min < 1.0)) throw std::invalid_argument("config: u_min must lie in (0, 1)");
  if (!u.per_iteration && !(u.constant > u_min && u.constant <= 1.0))
    throw std::invalid_argument("config: u must lie in (u_min, 1]");
  if (max_outer < 0) throw std::invalid_argument("config: max_outer must be nonnegative");
  if (max_doublings < 0) throw std::invalid_argument("config: max_doublings must be nonnegative");
  if (inner.max_inner < 1 || !(inner.step_guess > 0.0))
    throw std::invalid_argument("config: bad inner limits");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::stationary: return "stationary";
    case RunStatus::max_iters: return "max_iters";
    case RunStatus::stopped_by_criterion: return "stopped-by-criterion";
    case RunStatus::line_search_failure: return "line-search-failure";
    case RunStatus::oracle_failure: return "oracle-failure";
  }
  return "unknown";
}

std::vector<double> IterateTrace::f_series() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.f);
  return out;
}

std::vector<double> IterateTrace::stationarity_series() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.stationarity);
  return out;
}

double update_reference(double R, double f_new, double u) {
  if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("update_reference: u must lie in (0, 1]");
  return (1.0 - u) * R + u * f_new;
}

bool accept_test(double R, double f_cand, double step_norm, double Mtilde, int p) {
  return f_cand <= R - Mtilde / factorial(p + 1) * std::pow(step_norm, p + 1);
}

StepResult try_step(const CompositeProblem& problem, const ModelCenter& center, double R,
                    double M_in, const RunConfig& config, const AcceptTest& accept) {
  StepResult out;
  out.kind = StepResult::Kind::line_search_failure;
  double M = M_in;
  Vector previous;
  const double f_center = center.fx + problem.nonsmooth.value(center.x);
  for (int i = 0; i <= config.max_doublings; ++i, M *= 2.0) {
    InnerResult inner = solve_subproblem(problem, center, M, config.theta, config.inner,
                                         previous.size() > 0 ? &previous : nullptr);
    out.inner_iters += inner.cert.inner_iters;
    out.backtracks = i;
    out.M_used = M;
    out.cert = inner.cert;
    out.y = inner.y;
    out.witness = inner.witness;
    switch (inner.status) {
      case InnerStatus::oracle_failure:
        out.kind = StepResult::Kind::oracle_failure;
        return out;
      case InnerStatus::stationary:
        out.kind = StepResult::Kind::stationary;
        out.f_y = problem.objective(inner.y);
        return out;
      case InnerStatus::inner_failure:
      case InnerStatus::certified:
        break;
    }
    if (inner.status == InnerStatus::certified) {
      out.f_y = problem.objective(inner.y);
      if (!std::isfinite(out.f_y)) {
        out.kind = StepResult::Kind::oracle_failure;
        return out;
      }
      if (accept(R, out.f_y, inner.cert.witness_norm, config.Mtilde, center.p)) {
        out.kind = StepResult::Kind::accepted;
        return out;
      }
    }
    // A failed trial whose predicted decrease is below the rounding level of
    // f cannot be told apart from no progress, and larger M only shrinks it.
    // This is also where the residual test stops being satisfiable: the
    // model gradient at any representable y carries an error of order
    // |H| ulp(x_k).
    const double predicted =
        f_center - (model_value(center, inner.y, M) + problem.nonsmooth.value(inner.y));
    if (predicted <= kRoundingFloor * std::max(1.0, std::abs(f_center))) {
      out.kind = StepResult::Kind::stationary;
      out.at_rounding_floor = true;
      return out;
    }
    previous = std::move(inner.y);
  }
  out.kind = StepResult::Kind::line_search_failure;
  return out;
}

IterateTrace nhota_run(const CompositeProblem& problem, const Vector& x0, const RunConfig& config,
                       const RowObserver& on_row, const AcceptTest& accept) {
  problem.validate();
  config.validate();
  if (x0.size() != problem.dim()) throw std::invalid_argument("nhota_run: x0 has wrong dimension");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  IterateTrace trace;
  trace.p = config.p;
  trace.Mtilde = config.Mtilde;
  trace.u_min = config.u_min;
  trace.x_final = x0;

  Vector x = x0;
  double R = 0.0;
  double M = config.M0;
  Vector witness;  // element of dh(x_k) from the last accepted prox step
  TraceRow row;

  for (int k = 0;; ++k) {
    ModelCenter center;
    double f = 0.0;
    try {
      center = ModelCenter::build(problem.smooth, x, config.p);
      f = center.fx + problem.nonsmooth.value(x);
      if (!std::isfinite(f)) throw OracleError("non-finite objective");
    } catch (const OracleError& e) {
      trace.status = RunStatus::oracle_failure;
      std::ostringstream msg;
      msg << "oracle failure at iterate " << k << ": " << e.what();
      trace.message = msg.str();
      trace.x_final = x;
      return trace;
    }
    if (k == 0) R = f;

    row.k = k;
    row.f = f;
    row.R = R;
    if (problem.nonsmooth.has_subdiff_dist()) {
      row.stationarity = problem.nonsmooth.subdiff_dist(center.gx, x);
      row.stationarity_is_bound = false;
    } else if (witness.size() == x.size()) {
      row.stationarity = (center.gx + witness).norm();
      row.stationarity_is_bound = true;
    } else {
      // no witness at x0; the prox residual at unit step stands in
      const Vector z = problem.nonsmooth.prox(x - center.gx, 1.0);
      row.stationarity = (x - z).norm();
      row.stationarity_is_bound = true;
    }
    row.wall_millis = elapsed_ms();
    trace.rows.push_back(row);
    trace.x_final = x;
    if (on_row) on_row(row);

    if (!row.stationarity_is_bound && row.stationarity <= config.stationary_floor) {
      trace.status = RunStatus::stationary;
      return trace;
    }
    if (f <= config.stop_f || row.stationarity <= config.stop_stat) {
      trace.status = RunStatus::stopped_by_criterion;
      return trace;
    }
    if (k >= config.max_outer) {
      trace.status = RunStatus::max_iters;
      return trace;
    }

    StepResult step;
    try {
      step = try_step(problem, center, R, M, config, accept);
    } catch (const OracleError& e) {
      step.kind = StepResult::Kind::oracle_failure;
    }
    switch (step.kind) {
      case StepResult::Kind::stationary:
        trace.status = RunStatus::stationary;
        if (step.at_rounding_floor)
          trace.message = "predicted decrease fell below the rounding level of f at iterate " +
                          std::to_string(k);
        return trace;
      case StepResult::Kind::line_search_failure: {
        trace.status = RunStatus::line_search_failure;
        std::ostringstream msg;
        msg << "no acceptable step from iterate " << k << " after " << config.max_doublings
            << " doublings (M reached " << step.M_used << ")";
        trace.message = msg.str();
        return trace;
      }
      case StepResult::Kind::oracle_failure: {
        trace.status = RunStatus::oracle_failure;
        std::ostringstream msg;
        msg << "oracle failure while stepping from iterate " << k;
        trace.message = msg.str();
        return trace;
      }
      case StepResult::Kind::accepted:
        break;
    }

    trace.M_max = std::max(trace.M_max, step.M_used);
    row = TraceRow{};
    row.M = step.M_used;
    row.step_norm = step.cert.witness_norm;
    row.inner_iters = step.inner_iters;
    row.backtracks = step.backtracks;
    row.certified = step.cert.valid();

    const double u = config.u.at(k + 1);
    if (!(u > config.u_min && u <= 1.0))
      throw std::invalid_argument("u schedule emitted a weight outside (u_min, 1]");
    row.u = u;
    R = update_reference(R, step.f_y, u);
    M = std::max(step.M_used / 2.0, config.M0);
    x = std::move(step.y);
    witness = std::move(step.witness);
  }
}

}  // namespace nhota
