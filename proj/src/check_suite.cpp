#include "nhota/check_suite.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include "nhota/core.hpp"
#include "nhota/driver.hpp"
#include "nhota/inner.hpp"
#include "nhota/metrics.hpp"
#include "nhota/problems.hpp"
#include "nhota/reference_oracles.hpp"
#include "nhota/taylor.hpp"

namespace nhota {

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Vector random_vector(NormalStream& rng, int n, double sd = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal(0.0, sd);
  return v;
}

RunConfig run_cfg(int p, double u, int max_outer) {
  RunConfig rc;
  rc.p = p;
  rc.u.constant = u;
  rc.max_outer = max_outer;
  return rc;
}

CheckResult check_prox_examples() {
  const Vector out = prox_l1((Vector(3) << 3.0, -0.5, 0.0).finished(), 1.0);
  const Vector tiny_in = (Vector(3) << 0.3, -2.0, 1e-3).finished();
  const double id_err = (prox_l1(tiny_in, 1e-300) - tiny_in).cwiseAbs().maxCoeff();
  const bool ok = out == (Vector(3) << 2.0, 0.0, 0.0).finished() && id_err <= 1e-12;
  return {"prox_l1.closed_form", ok, fmt("identity-limit error %.2e", id_err)};
}

CheckResult check_prox_grid() {
  NormalStream rng(11);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double v = rng.normal(0.0, 1.0);
    const double tau = 0.05 + rng.uniform();
    const double grid = reference::grid_prox_1d(v, tau, -3.0, 3.0, 1e-4);
    const double fast = prox_l1(Vector::Constant(1, v), tau)[0];
    worst = std::max(worst, std::abs(grid - fast));
  }
  return {"prox_l1.grid_oracle", worst <= 2e-4, fmt("max |prox - grid| = %.2e (tol 2e-4)", worst)};
}

CheckResult check_prox_nonexpansive() {
  NormalStream rng(12);
  double worst = -1.0;
  for (int i = 0; i < 500; ++i) {
    const Vector u = random_vector(rng, 5), v = random_vector(rng, 5);
    const double tau = 2.0 * rng.uniform();
    worst = std::max(worst, (prox_l1(u, tau) - prox_l1(v, tau)).norm() - (u - v).norm());
  }
  return {"prox_l1.nonexpansive", worst <= 1e-14, fmt("max excess %.2e", worst)};
}

CheckResult check_prox_optimality() {
  NormalStream rng(13);
  double worst = 1.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Vector v = random_vector(rng, 6);
    const double tau = 0.1 + rng.uniform();
    const Vector p = prox_l1(v, tau);
    const double best = tau * p.lpNorm<1>() + 0.5 * (p - v).squaredNorm();
    for (int i = 0; i < 1000; ++i) {
      const Vector y = p + random_vector(rng, 6, 0.1);
      const double obj = tau * y.lpNorm<1>() + 0.5 * (y - v).squaredNorm();
      worst = std::min(worst, obj - best);
    }
  }
  return {"prox_l1.optimality", worst >= -1e-14, fmt("min objective gap %.2e", worst)};
}

CheckResult check_subdiff_examples() {
  const double a = subdiff_dist_l1((Vector(2) << -0.5, 0.2).finished(), (Vector(2) << 2.0, 0.0).finished(), 0.5);
  const double b = subdiff_dist_l1(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0), 0.5);
  const double c = subdiff_dist_l1(Vector::Constant(1, 0.8), Vector::Constant(1, 0.0), 0.5);
  const bool ok = a == 0.0 && std::abs(b - 1.5) <= 1e-15 && std::abs(c - 0.3) <= 1e-15;
  return {"subdiff_dist_l1.examples", ok, fmt("values %.3g %.3g %.3g", a, b, c)};
}

CheckResult check_subdiff_grid() {
  // dyadic data so the grid contains the exact minimizer
  NormalStream rng(14);
  const double step = 1.0 / 64.0;
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const double lambda = 0.5 * (1 + trial % 4);
    Vector g(n), x(n);
    for (int i = 0; i < n; ++i) {
      const double r = rng.uniform();
      x[i] = r < 0.4 ? 0.0 : (r < 0.7 ? 1.25 : -0.75);
      g[i] = std::round(rng.normal(0.0, 1.5) * 64.0) / 64.0 * lambda;
    }
    const double grid = reference::grid_subdiff_dist(g, x, lambda, step);
    worst = std::max(worst, std::abs(grid - subdiff_dist_l1(g, x, lambda)));
  }
  return {"subdiff_dist_l1.grid_enumeration", worst <= 1e-10, fmt("max deviation %.2e (tol 1e-10)", worst)};
}

CheckResult check_phase_fd() {
  const PhaseRetrieval pr = gen_phase_retrieval(6, 40, 21, 1.0, 1e-5);
  NormalStream rng(22);
  double g_err = 0.0, h_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Vector x = random_vector(rng, 6);
    g_err = std::max(g_err, reference::relative_error(pr.problem.smooth.gradient(x),
                                                      reference::fd_gradient(pr.problem.smooth.value, x, 1e-5)));
    h_err = std::max(h_err, reference::relative_error(pr.problem.smooth.hessian(x),
                                                      reference::fd_hessian(pr.problem.smooth.gradient, x, 1e-5)));
  }
  return {"phase.derivatives_fd", g_err <= 1e-5 && h_err <= 1e-5,
          fmt("gradient rel err %.2e, Hessian rel err %.2e (tol 1e-5)", g_err, h_err)};
}

CheckResult check_taylor_fd() {
  const PhaseRetrieval pr = gen_phase_retrieval(5, 30, 23, 1.0, 1e-5);
  NormalStream rng(24);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int p = 1 + i % 2;
    const ModelCenter c = ModelCenter::build(pr.problem.smooth, random_vector(rng, 5), p);
    const Vector y = c.x + random_vector(rng, 5, 0.5);
    const double M = 0.5 + rng.uniform();
    auto tv = [&c](const Vector& v) { return taylor_value(c, v); };
    auto mv = [&c, M](const Vector& v) { return model_value(c, v, M); };
    worst = std::max(worst, reference::relative_error(taylor_grad(c, y), reference::fd_gradient(tv, y, 1e-5)));
    worst = std::max(worst, reference::relative_error(model_grad(c, y, M), reference::fd_gradient(mv, y, 1e-5)));
  }
  return {"taylor.gradients_fd", worst <= 1e-6, fmt("max rel err %.2e (tol 1e-6)", worst)};
}

CheckResult check_diag_exact() {
  const DiagQuadL1 dq = gen_diag_quad(50, 3, 0.1);
  const DiagSolution sol = exact_solution_diag(dq.data);
  const double s = subdiff_dist_l1(dq.problem.smooth.gradient(sol.x), sol.x, dq.data.lambda);
  return {"diag.exact_solution", s <= 1e-12, fmt("stationarity at x* %.2e", s)};
}

CheckResult check_certificates() {
  NormalStream rng(31);
  int accepted = 0, bad = 0;
  double worst = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 9;
    const int p = 1 + trial % 2;
    CompositeProblem prob;
    Vector x0;
    if (trial % 2 == 0) {
      const PhaseRetrieval pr = gen_phase_retrieval(n, 5 * n, 1000 + trial, 0.5, 1e-3);
      prob = pr.problem;
      x0 = pr.x0;
    } else {
      const DiagQuadL1 dq = gen_diag_quad(n, 1000 + trial, 0.2);
      prob = dq.problem;
      x0 = dq.x0;
    }
    RunConfig rc = run_cfg(p, 0.5, 15);
    const ModelCenter c0 = ModelCenter::build(prob.smooth, x0, p);
    const double M = 0.1 + 10.0 * rng.uniform();
    const InnerResult r = solve_subproblem(prob, c0, M, rc.theta, rc.inner);
    if (r.status != InnerStatus::certified) continue;
    ++accepted;
    const StepCertificate cert = certify(prob, c0, r.y, M, rc.theta, r.witness);
    worst = std::max(worst, cert.residual - cert.threshold);
    if (!cert.decrease_ok || cert.residual > cert.threshold + 1e-8) ++bad;
  }
  return {"inner.certificate_soundness", bad == 0 && accepted > 0,
          fmt("%.0f certified solves, %.0f invalid, max residual-threshold %.2e", accepted, bad, worst)};
}

CheckResult check_witness() {
  const PhaseRetrieval pr = gen_phase_retrieval(8, 40, 41, 0.5, 0.05);
  const ModelCenter c = ModelCenter::build(pr.problem.smooth, pr.x0, 2);
  const InnerResult r = solve_subproblem(pr.problem, c, 5.0, 0.1, InnerLimits{});
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r.y.size(); ++i) {
    worst = std::max(worst, std::abs(r.witness[i]) - 0.05);
    if (r.y[i] != 0.0) worst = std::max(worst, std::abs(r.witness[i] - std::copysign(0.05, r.y[i])));
  }
  return {"inner.l1_witness", worst <= 1e-10, fmt("max witness violation %.2e", worst)};
}

CheckResult check_reference_invariants(CheckScale scale) {
  int runs = 0, bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  const int seeds = scale == CheckScale::full ? 5 : 2;
  for (int seed = 1; seed <= seeds; ++seed)
    for (int p : {1, 2})
      for (double u : {0.05, 0.5, 1.0}) {
        const PhaseRetrieval pr = gen_phase_retrieval(20, 200, seed, 1.0, 1e-5);
        const DiagQuadL1 dq = gen_diag_quad(50, seed, 0.1);
        for (const auto* inst : {&pr.problem, &dq.problem}) {
          const Vector& x0 = inst == &pr.problem ? pr.x0 : dq.x0;
          const IterateTrace tr = nhota_run(*inst, x0, run_cfg(p, u, 300));
          const ReferenceAudit a = audit_reference(tr);
          ++runs;
          worst = std::max(worst, a.worst_violation);
          if (!a.ok()) ++bad;
        }
      }
  return {"driver.reference_invariants", bad == 0,
          fmt("%.0f runs, %.0f violating, worst excess %.2e", runs, bad, worst)};
}

CheckResult check_u1_monotone() {
  const PhaseRetrieval pr = gen_phase_retrieval(20, 200, 7, 1.0, 1e-5);
  const IterateTrace tr = nhota_run(pr.problem, pr.x0, run_cfg(2, 1.0, 200));
  double worst = -std::numeric_limits<double>::infinity();
  double R_gap = 0.0;
  for (std::size_t k = 1; k < tr.rows.size(); ++k) worst = std::max(worst, tr.rows[k].f - tr.rows[k - 1].f);
  for (const auto& r : tr.rows) R_gap = std::max(R_gap, std::abs(r.R - r.f));
  return {"driver.u1_monotone", worst <= 0.0 && R_gap == 0.0,
          fmt("max f increase %.2e, max |R - f| %.2e", worst, R_gap)};
}

CheckResult check_diag_converges() {
  double worst = 0.0;
  int bad = 0;
  for (int seed = 1; seed <= 5; ++seed) {
    const DiagQuadL1 dq = gen_diag_quad(50, seed, 0.1);
    const IterateTrace tr = nhota_run(dq.problem, dq.x0, run_cfg(2, 0.5, 60));
    const double gap = tr.rows.back().f - dq.problem.known_opt->f;
    worst = std::max(worst, gap);
    if (gap > 1e-8) ++bad;
  }
  return {"driver.diag_reaches_optimum", bad == 0, fmt("max final gap %.2e (tol 1e-8)", worst)};
}

CheckResult check_stationary_start() {
  const DiagQuadL1 dq = gen_diag_quad(10, 5, 0.1);
  const IterateTrace tr = nhota_run(dq.problem, dq.problem.known_opt->x, run_cfg(2, 0.5, 50));
  const bool ok = tr.status == RunStatus::stationary && tr.rows.size() == 1;
  return {"driver.stationary_start", ok, std::string("status ") + to_string(tr.status)};
}

CheckResult check_rate_fit() {
  std::vector<double> s(60);
  for (int k = 1; k < 60; ++k) s[k] = 3.0 * std::pow(k, -2.0 / 3.0);
  s[0] = 1.0;
  const RateFit fit = rate_fit(s, Window{3, 59});
  const double secant = (std::log(s[59]) - std::log(s[3])) / (std::log(59.0) - std::log(3.0));
  const bool ok = std::abs(fit.slope + 2.0 / 3.0) <= 1e-6 && std::abs(fit.slope - secant) <= 1e-3;
  return {"metrics.rate_fit_power_law", ok, fmt("slope %.8f, secant %.8f", fit.slope, secant)};
}

CheckResult check_kl_synthetic() {
  std::vector<double> geo(40), pw(40);
  for (int k = 0; k < 40; ++k) {
    geo[k] = std::pow(2.0, -k);
    pw[k] = k == 0 ? 2.0 : std::pow(static_cast<double>(k), -2.0);
  }
  const KlProbe a = kl_probe(geo, 0.0);
  const KlProbe b = kl_probe(pw, 0.0);
  const bool ok = a.shape == RateShape::linear && std::abs(a.rho - 0.5) <= 1e-6 &&
                  b.shape == RateShape::sublinear && std::abs(b.beta - 2.0) <= 0.1;
  return {"metrics.kl_probe_synthetic", ok, fmt("rho %.4f, beta %.4f", a.rho, b.beta)};
}

CheckResult check_kl_diag() {
  const DiagQuadL1 dq = gen_diag_quad(50, 3, 0.1);
  const IterateTrace tr = nhota_run(dq.problem, dq.x0, run_cfg(2, 0.5, 60));
  const KlProbe probe = kl_probe(tr, dq.problem.known_opt->f);
  return {"metrics.kl_probe_strongly_convex", probe.shape == RateShape::linear,
          std::string("shape ") + to_string(probe.shape) + fmt(", r2 linear %.3f vs power %.3f", probe.r2_linear, probe.r2_power)};
}

CheckResult check_remainder_phase() {
  const PhaseRetrieval pr = gen_phase_retrieval(10, 50, 7, 1.0, 1e-5);
  const RemainderReport r2 = remainder_check(pr.problem, pr.x0, 1.0, 500, 2);
  const RemainderReport r1 = remainder_check(pr.problem, pr.x0, 1.0, 500, 1);
  return {"metrics.remainder_phase_retrieval", r1.passed && r2.passed,
          fmt("margin p=1 %.3g, p=2 %.3g, L_hat(p=2) %.3g", r1.margin, r2.margin, r2.L_hat)};
}

CheckResult check_remainder_diag() {
  const DiagQuadL1 dq = gen_diag_quad(20, 3, 0.1);
  const RemainderReport r2 = remainder_check(dq.problem, dq.x0, 1.0, 500, 2);
  const RemainderReport r1 = remainder_check(dq.problem, dq.x0, 1.0, 500, 1);
  return {"metrics.remainder_diag_quad", r1.passed && r2.passed,
          fmt("margin p=1 %.3g, p=2 %.3g", r1.margin, r2.margin)};
}

CheckResult check_lipschitz_growth() {
  const PhaseRetrieval pr = gen_phase_retrieval(10, 50, 7, 1.0, 1e-5);
  const double r1 = lipschitz_estimate(pr.problem, pr.x0, 1.0, 2, 200, 5);
  const double r10 = lipschitz_estimate(pr.problem, pr.x0, 10.0, 2, 200, 5);
  const double r100 = lipschitz_estimate(pr.problem, pr.x0, 100.0, 2, 200, 5);
  return {"metrics.hessian_not_globally_lipschitz", r1 < r10 && r10 < r100 && r100 > 5.0 * r1,
          fmt("L_hat at radius 1, 10, 100: %.3g, %.3g, %.3g", r1, r10, r100)};
}

CheckResult check_stationarity_rate(int p) {
  const PhaseRetrieval pr = gen_phase_retrieval(20, 200, 7, 1.0, 1e-5);
  RunConfig rc = run_cfg(p, 0.5, 200);
  const IterateTrace tr = nhota_run(pr.problem, pr.x0, rc);
  const auto stat = prefix_min(tr.stationarity_series());
  const int last = static_cast<int>(stat.size()) - 1;
  if (last < 7) return {p == 2 ? "metrics.stationarity_rate_p2" : "metrics.stationarity_rate_p1", false, "trace too short"};
  const RateFit fit = rate_fit(stat, last);
  const double limit = -static_cast<double>(p) / (p + 1) + 0.2;
  // the envelope bounds the exponent only; r2 is reported, not gated
  return {p == 2 ? "metrics.stationarity_rate_p2" : "metrics.stationarity_rate_p1",
          fit.slope <= limit, fmt("slope %.3f (<= %.3f), r2 %.3f", fit.slope, limit, fit.r2)};
}

CheckResult check_fault_injection() {
  // accept with the sign of Mtilde flipped; the audit must notice
  const PhaseRetrieval pr = gen_phase_retrieval(20, 200, 7, 1.0, 1e-5);
  RunConfig rc = run_cfg(2, 1.0, 50);
  rc.Mtilde = 10.0;
  const AcceptTest corrupted = [](double R, double f, double s, double Mt, int p) {
    return accept_test(R, f, s, -Mt, p);
  };
  const IterateTrace tr = nhota_run(pr.problem, pr.x0, rc, {}, corrupted);
  const ReferenceAudit a = audit_reference(tr);
  return {"selftest.corrupted_acceptance_detected", !a.ok(),
          fmt("audit worst excess %.3g at row %.0f", a.worst_violation, a.first_bad_row)};
}

CheckResult check_desk_experiment() {
  const PhaseRetrieval pr = gen_phase_retrieval(100, 1000, 7, 1.0, 1e-5);
  int bad = 0;
  double worst_stat = 0.0;
  for (double u : {0.05, 0.25, 0.5, 0.75, 1.0}) {
    RunConfig rc = run_cfg(2, u, 500);
    rc.stop_f = 1e-3;
    rc.stop_stat = 1e-3;
    const IterateTrace tr = nhota_run(pr.problem, pr.x0, rc);
    const bool stopped = tr.status == RunStatus::stopped_by_criterion || tr.status == RunStatus::stationary;
    if (!stopped) ++bad;
    worst_stat = std::max(worst_stat, tr.rows.back().stationarity);
  }
  return {"experiment.phase_retrieval_100x1000", bad == 0,
          fmt("%.0f runs failed to stop, worst final stationarity %.2e", bad, worst_stat)};
}

}  // namespace

std::vector<CheckResult> run_check_suite(CheckScale scale, const CheckObserver& on_result) {
  std::vector<std::function<CheckResult()>> checks = {
      check_prox_examples,
      check_prox_grid,
      check_prox_nonexpansive,
      check_prox_optimality,
      check_subdiff_examples,
      check_subdiff_grid,
      check_phase_fd,
      check_taylor_fd,
      check_diag_exact,
      check_certificates,
      check_witness,
      [scale] { return check_reference_invariants(scale); },
      check_u1_monotone,
      check_diag_converges,
      check_stationary_start,
      check_rate_fit,
      check_kl_synthetic,
      check_kl_diag,
      check_remainder_phase,
      check_remainder_diag,
      check_lipschitz_growth,
      [] { return check_stationarity_rate(1); },
      [] { return check_stationarity_rate(2); },
      check_fault_injection,
  };
  if (scale == CheckScale::full) checks.push_back(check_desk_experiment);

  std::vector<CheckResult> results;
  for (const auto& check : checks) {
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {"(exception)", false, e.what()};
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace nhota
