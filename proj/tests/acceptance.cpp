// Acceptance run: one PASS/FAIL line per criterion at the stated tolerances.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nhota/core.hpp"
#include "nhota/driver.hpp"
#include "nhota/experiment.hpp"
#include "nhota/inner.hpp"
#include "nhota/metrics.hpp"
#include "nhota/problems.hpp"
#include "nhota/reference_oracles.hpp"
#include "nhota/taylor.hpp"

using namespace nhota;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

RunConfig run_cfg(int p, double u, int max_outer) {
  RunConfig rc;
  rc.p = p;
  rc.u.constant = u;
  rc.max_outer = max_outer;
  return rc;
}

Vector normal_vector(NormalStream& rng, int n, double sd = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal(0.0, sd);
  return v;
}

bool monotone_f(const IterateTrace& t) {
  for (std::size_t k = 1; k < t.rows.size(); ++k)
    if (t.rows[k].f > t.rows[k - 1].f) return false;
  return true;
}

// 1. reference-value invariants on every shipped small run
Outcome reference_invariants() {
  const auto t0 = Clock::now();
  int runs = 0, bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  std::string first_bad;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const PhaseRetrieval pr = gen_phase_retrieval(20, 200, seed, 1.0, 1e-5);
    const DiagQuadL1 dq = gen_diag_quad(50, seed, 0.1);
    for (int p : {1, 2})
      for (double u : {0.05, 0.5, 1.0})
        for (int which = 0; which < 2; ++which) {
          const CompositeProblem& prob = which == 0 ? pr.problem : dq.problem;
          const Vector& x0 = which == 0 ? pr.x0 : dq.x0;
          const IterateTrace tr = nhota_run(prob, x0, run_cfg(p, u, 1000));
          const ReferenceAudit a = audit_reference(tr, 1e-9);
          ++runs;
          worst = std::max(worst, a.worst_violation);
          if (!a.ok()) {
            if (bad++ == 0)
              first_bad = fmt(" first: %s seed %d p %d u %g row %d", which == 0 ? "phase" : "diag",
                              static_cast<int>(seed), p, u, a.first_bad_row);
          }
        }
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 120.0,
          fmt("%d runs, %d violating, worst excess %.2e, %.1f s (limit 120 s)%s", runs, bad, worst, secs,
              first_bad.c_str())};
}

// 2. stationarity envelope decays like a power law with the predicted exponent
Outcome stationarity_rate() {
  const PhaseRetrieval pr = gen_phase_retrieval(20, 200, 7, 1.0, 1e-5);
  bool ok = true;
  std::string detail;
  for (int p : {2, 1}) {
    const IterateTrace tr = nhota_run(pr.problem, pr.x0, run_cfg(p, 0.5, 200));
    const auto env = prefix_min(tr.stationarity_series());
    const int last = static_cast<int>(env.size()) - 1;
    const double limit = -static_cast<double>(p) / (p + 1) + 0.2;
    if (last < 7) {
      ok = false;
      detail += fmt("p=%d: only %d rows; ", p, last + 1);
      continue;
    }
    const RateFit fit = rate_fit(env, last);
    const bool slope_ok = fit.slope <= limit;
    const bool r2_ok = p == 1 || fit.r2 >= 0.8;
    ok = ok && slope_ok && r2_ok;
    detail += fmt("p=%d: slope %.3f (<= %.3f) r2 %.3f%s over k=%d..%d, %s; ", p, fit.slope, limit, fit.r2,
                  p == 2 ? " (>= 0.8)" : "", fit.window.first, fit.window.last, to_string(tr.status));
  }
  return {ok, detail};
}

// 3. convex case reaches the optimum fast
Outcome convex_rate() {
  const DiagQuadL1 dq = gen_diag_quad(50, 3, 0.1);
  const double f_star = exact_solution_diag(dq.data).f;
  const IterateTrace tr = nhota_run(dq.problem, dq.x0, run_cfg(2, 0.5, 60));
  int hit = -1;
  std::vector<double> gap;
  for (const auto& r : tr.rows) {
    gap.push_back(r.f - f_star);
    if (hit < 0 && r.f - f_star <= 1e-10) hit = r.k;
  }
  // pre-stopping window: rows whose gap is still above the rounding level
  int last = 0;
  while (last + 1 < static_cast<int>(gap.size()) && gap[last + 1] > 1e-13 * std::max(1.0, std::abs(f_star))) ++last;
  std::string fit_note = "power fit needs 5 points from k=3";
  bool power_ok = false;
  if (last >= 7) {
    const RateFit fit = rate_fit(gap, last);
    power_ok = fit.slope <= -2.0 + 0.3;
    fit_note = fmt("slope %.3f", fit.slope);
  }
  const KlProbe probe = kl_probe(tr, f_star);
  const bool linear = probe.shape == RateShape::linear;
  return {hit >= 0 && hit <= 60 && (power_ok || linear),
          fmt("gap <= 1e-10 at k=%d (limit 60); %s; kl_probe %s (rho %.3g)", hit, fit_note.c_str(),
              to_string(probe.shape), probe.rho)};
}

// 4. linear rate under the KL property, plus the probe's self-tests. The
// second-order runs finish in about four steps, so some seeds leave too few
// gap values above the rounding floor to classify; those may come out
// inconclusive but never sublinear. First-order runs give long traces.
Outcome kl_regime() {
  const DiagQuadL1 canonical = gen_diag_quad(50, 3, 0.1);
  const KlProbe main = kl_probe(nhota_run(canonical.problem, canonical.x0, run_cfg(2, 0.5, 60)),
                                canonical.problem.known_opt->f);
  bool ok = main.shape == RateShape::linear;
  std::string p2, p1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DiagQuadL1 dq = gen_diag_quad(50, seed, 0.1);
    const double f_star = dq.problem.known_opt->f;
    const KlProbe a = kl_probe(nhota_run(dq.problem, dq.x0, run_cfg(2, 0.5, 60)), f_star);
    const KlProbe b = kl_probe(nhota_run(dq.problem, dq.x0, run_cfg(1, 0.5, 300)), f_star);
    ok = ok && a.shape != RateShape::sublinear && b.shape == RateShape::linear;
    p2 += fmt("%s%s", seed == 1 ? "" : ",", to_string(a.shape));
    p1 += fmt("%s%s", seed == 1 ? "" : ",", to_string(b.shape));
  }
  std::vector<double> geo(40), pw(40);
  for (int k = 0; k < 40; ++k) {
    geo[k] = std::pow(2.0, -k);
    pw[k] = k == 0 ? 2.0 : std::pow(static_cast<double>(k), -2.0);
  }
  const KlProbe a = kl_probe(geo, 0.0);
  const KlProbe b = kl_probe(pw, 0.0);
  ok = ok && a.shape == RateShape::linear && b.shape == RateShape::sublinear && std::abs(b.beta - 2.0) <= 0.1;
  return {ok, fmt("seed 3 p=2: %s (r2 %.3f vs %.3f); p=2 seeds 1-5: %s; p=1 seeds 1-5: %s; 2^-k: %s rho %.4f; "
                  "k^-2: %s beta %.4f",
                  to_string(main.shape), main.r2_linear, main.r2_power, p2.c_str(), p1.c_str(), to_string(a.shape),
                  a.rho, to_string(b.shape), b.beta)};
}

// 5. desk-scale phase retrieval for every u
Outcome desk_experiment() {
  const PhaseRetrieval pr = gen_phase_retrieval(100, 1000, 7, 1.0, 1e-5);
  bool ok = true;
  std::string detail;
  for (double u : {0.05, 0.25, 0.5, 0.75, 1.0}) {
    RunConfig rc = run_cfg(2, u, 500);
    rc.stop_f = 1e-3;
    rc.stop_stat = 1e-3;
    const auto t0 = Clock::now();
    const IterateTrace tr = nhota_run(pr.problem, pr.x0, rc);
    const double secs = seconds_since(t0);
    const auto& last = tr.rows.back();
    const bool reached = last.f <= 1e-3 || last.stationarity <= 1e-3;
    const bool mono = monotone_f(tr);
    ok = ok && reached && last.k <= 500 && secs < 300.0 && (u < 1.0 || mono);
    detail += fmt("u=%g: k=%d S=%.1e %.2fs%s; ", u, last.k, last.stationarity, secs,
                  mono ? " monotone" : " nonmonotone");
  }
  return {ok, detail};
}

// 6. every accepted step re-certifies from raw oracle calls
Outcome certificate_soundness() {
  NormalStream rng(606);
  int instances = 0, steps = 0, bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 10;
    const int p = 1 + (trial / 3) % 2;
    CompositeProblem prob;
    Vector x0;
    switch (trial % 3) {
      case 0: {
        const PhaseRetrieval pr = gen_phase_retrieval(n, 5 * n, 7000 + trial, 0.5, 1e-3);
        prob = pr.problem;
        x0 = pr.x0;
        break;
      }
      case 1: {
        const DiagQuadL1 dq = gen_diag_quad(n, 7000 + trial, 0.2);
        prob = dq.problem;
        x0 = dq.x0;
        break;
      }
      default: {
        // witness-only h: the residual is the prox witness bound
        const PhaseRetrieval pr = gen_phase_retrieval(n, 5 * n, 7000 + trial, 0.5, 1e-2);
        prob = pr.problem;
        prob.nonsmooth.subdiff_dist = nullptr;
        x0 = pr.x0;
        break;
      }
    }
    ++instances;
    const RunConfig rc = run_cfg(p, 0.5, 25);
    Vector x = x0;
    double R = prob.objective(x);
    double M = rc.M0;
    for (int k = 0; k < rc.max_outer; ++k) {
      const ModelCenter center = ModelCenter::build(prob.smooth, x, p);
      const StepResult step = try_step(prob, center, R, M, rc);
      if (step.kind != StepResult::Kind::accepted) break;
      const StepCertificate cert = certify(prob, center, step.y, step.M_used, rc.theta, step.witness);
      ++steps;
      worst = std::max(worst, cert.residual - cert.threshold);
      if (!cert.decrease_ok || cert.residual > cert.threshold + 1e-8) ++bad;
      R = update_reference(R, step.f_y, 0.5);
      M = std::max(step.M_used / 2.0, rc.M0);
      x = step.y;
    }
  }
  return {bad == 0 && steps > 0,
          fmt("%d instances, %d accepted steps, %d invalid, max residual - threshold %.2e", instances, steps, bad, worst)};
}

// 7. oracles against finite differences and brute force
Outcome oracle_correctness() {
  const PhaseRetrieval pr = gen_phase_retrieval(10, 50, 7, 1.0, 1e-5);
  NormalStream rng(707);
  double g_err = 0.0, h_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Vector x = normal_vector(rng, 10);
    g_err = std::max(g_err, reference::relative_error(pr.problem.smooth.gradient(x),
                                                      reference::fd_gradient(pr.problem.smooth.value, x, 1e-5)));
    h_err = std::max(h_err, reference::relative_error(pr.problem.smooth.hessian(x),
                                                      reference::fd_hessian(pr.problem.smooth.gradient, x, 1e-5)));
  }

  double prox_err = std::abs(reference::grid_prox_1d(0.7, 0.5, -2.0, 2.0, 1e-4) - prox_l1(Vector::Constant(1, 0.7), 0.5)[0]);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.normal(0.0, 1.5);
    const double tau = 0.01 + 2.0 * rng.uniform();
    const double grid = reference::grid_prox_1d(v, tau, -8.0, 8.0, 1e-4);
    prox_err = std::max(prox_err, std::abs(grid - prox_l1(Vector::Constant(1, v), tau)[0]));
  }

  // lattice data: the grid contains the minimizing subgradient
  double sub_err = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const double lambda = 0.25 * (1 + trial % 4);
    Vector g(n), x(n);
    for (int i = 0; i < n; ++i) {
      const double r = rng.uniform();
      x[i] = r < 0.4 ? 0.0 : (r < 0.7 ? 1.5 : -0.25);
      g[i] = std::round(rng.normal(0.0, 1.5) * 64.0) / 64.0 * lambda;
    }
    sub_err = std::max(sub_err, std::abs(reference::grid_subdiff_dist(g, x, lambda, 1.0 / 64.0) -
                                         subdiff_dist_l1(g, x, lambda)));
  }
  return {g_err <= 1e-5 && h_err <= 1e-5 && prox_err <= 2e-4 && sub_err <= 1e-10,
          fmt("gradient %.2e, Hessian %.2e (tol 1e-5); prox %.2e (tol 2e-4); subdiff %.2e (tol 1e-10)", g_err, h_err,
              prox_err, sub_err)};
}

// 8. sampled Taylor remainder bound on the shipped problems
Outcome remainder_diagnostic() {
  struct Item {
    std::string name;
    CompositeProblem problem;
    Vector x;
  };
  std::vector<Item> items;
  for (const char* cfg : {"phase_retrieval_desk.cfg", "phase_retrieval_full.cfg", "diag_quad.cfg"}) {
    const ExperimentConfig c = load_config(std::string(NHOTA_CONFIGS) + "/" + cfg);
    ProblemInstance inst = build_problem(c);
    items.push_back({cfg, std::move(inst.problem), std::move(inst.x0)});
  }
  const PhaseRetrieval small = gen_phase_retrieval(20, 200, 7, 1.0, 1e-5);
  items.push_back({"phase 20x200", small.problem, small.x0});
  const PhaseRetrieval tiny = gen_phase_retrieval(10, 50, 7, 1.0, 1e-5);
  items.push_back({"phase 10x50", tiny.problem, tiny.x0});

  bool ok = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string failures;
  for (const auto& item : items)
    for (int p : {1, 2}) {
      const RemainderReport r = remainder_check(item.problem, item.x, 1.0, 500, p);
      worst_margin = std::min(worst_margin, r.margin);
      if (!r.passed) {
        ok = false;
        failures += fmt(" %s p=%d margin %.3g;", item.name.c_str(), p, r.margin);
      }
    }
  return {ok, fmt("%zu problems x p in {1,2}, smallest margin %.3g%s", items.size(), worst_margin,
                  failures.empty() ? "" : failures.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"reference-value invariants on shipped runs", reference_invariants},
      {"nonconvex stationarity rate shape", stationarity_rate},
      {"convex rate on diagonal quadratic", convex_rate},
      {"linear rate under the KL property", kl_regime},
      {"desk-scale phase retrieval over u", desk_experiment},
      {"certificate soundness", certificate_soundness},
      {"oracle correctness", oracle_correctness},
      {"Taylor remainder diagnostic", remainder_diagnostic},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("[%s] %d. %s (%.1fs): %s\n", o.passed ? "PASS" : "FAIL", index, name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
