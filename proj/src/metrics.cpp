#include "nhota/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nhota/problems.hpp"
#include "nhota/taylor.hpp"

namespace nhota {

double stationarity(const CompositeProblem& problem, const Vector& x) {
  if (!problem.nonsmooth.has_subdiff_dist())
    throw CapabilityError("stationarity: h does not expose an exact subdifferential distance");
  return problem.nonsmooth.subdiff_dist(problem.smooth.gradient(x), x);
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

RateFit rate_fit(std::span<const double> series, Window window) {
  if (window.first < 1) throw std::invalid_argument("rate_fit: window must start at k >= 1");
  if (window.length() < 5) throw std::invalid_argument("rate_fit: window needs at least 5 points");
  if (window.last >= static_cast<int>(series.size()))
    throw std::invalid_argument("rate_fit: window runs past the series");
  std::vector<double> xs, ys;
  for (int k = window.first; k <= window.last; ++k) {
    if (!(series[k] > 0.0)) throw std::invalid_argument("rate_fit: series must be strictly positive");
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(series[k]));
  }
  const LineFit line = fit_line(xs, ys);
  return RateFit{line.slope, line.intercept, line.r2, window};
}

RateFit rate_fit(std::span<const double> series, int stop_index) {
  const int last = std::min(stop_index, static_cast<int>(series.size()) - 1);
  return rate_fit(series, Window{3, last});
}

std::vector<double> prefix_min(std::span<const double> series) {
  std::vector<double> out(series.begin(), series.end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::min(out[i], out[i - 1]);
  return out;
}

const char* to_string(RateShape s) {
  switch (s) {
    case RateShape::linear: return "linear";
    case RateShape::sublinear: return "sublinear";
    case RateShape::inconclusive: return "inconclusive";
  }
  return "unknown";
}

KlProbe kl_probe(std::span<const double> f_values, double f_star) {
  constexpr int kMinPoints = 4;
  constexpr double kBand = 0.02;
  KlProbe probe;
  // usable gaps: positive and above the rounding floor of f
  const double floor = 1e-13 * std::max(1.0, std::abs(f_star));
  int last = 0;
  for (int k = 1; k < static_cast<int>(f_values.size()); ++k) {
    if (!(f_values[k] - f_star > floor)) break;
    last = k;
  }
  // drop the transient when enough points remain
  const int first = last - 3 + 1 >= kMinPoints ? 3 : 1;
  probe.window = Window{first, last};
  if (last < 1 || probe.window.length() < kMinPoints) {
    probe.note = "window too short";
    return probe;
  }
  std::vector<double> ks, logks, logd;
  for (int k = first; k <= last; ++k) {
    ks.push_back(static_cast<double>(k));
    logks.push_back(std::log(static_cast<double>(k)));
    logd.push_back(std::log(f_values[k] - f_star));
  }
  const LineFit geo = fit_line(ks, logd);
  const LineFit pow = fit_line(logks, logd);
  probe.rho = std::exp(geo.slope);
  probe.beta = -pow.slope;
  probe.r2_linear = geo.r2;
  probe.r2_power = pow.r2;
  if (std::abs(geo.r2 - pow.r2) < kBand) {
    probe.note = "fits indistinguishable";
    probe.shape = RateShape::inconclusive;
  } else {
    probe.shape = geo.r2 > pow.r2 ? RateShape::linear : RateShape::sublinear;
  }
  return probe;
}

KlProbe kl_probe(const IterateTrace& trace, double f_star) {
  const auto f = trace.f_series();
  return kl_probe(f, f_star);
}

namespace {

Vector sample_ball(NormalStream& rng, const Vector& center, double radius) {
  const Eigen::Index n = center.size();
  Vector dir(n);
  for (Eigen::Index i = 0; i < n; ++i) dir[i] = rng.normal(0.0, 1.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  return center + (r / dir.norm()) * dir;
}

double derivative_distance(const CompositeProblem& problem, const Vector& u, const Vector& v, int p) {
  if (p == 1) return (problem.smooth.gradient(u) - problem.smooth.gradient(v)).norm();
  const Matrix diff = problem.smooth.hessian(u) - problem.smooth.hessian(v);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(diff, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double lipschitz_estimate(const CompositeProblem& problem, const Vector& x, double radius, int p,
                          int pairs, std::uint64_t seed) {
  NormalStream rng(seed);
  double L = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const Vector u = sample_ball(rng, x, radius);
    const Vector v = sample_ball(rng, x, radius);
    const double dist = (u - v).norm();
    if (dist == 0.0) continue;
    L = std::max(L, derivative_distance(problem, u, v, p) / dist);
  }
  return L;
}

RemainderReport remainder_check(const CompositeProblem& problem, const Vector& x, double radius,
                                int samples, int p, std::uint64_t seed) {
  if (!(radius > 0.0)) throw std::invalid_argument("remainder_check: radius must be positive");
  if (samples < 50) throw std::invalid_argument("remainder_check: need at least 50 samples");
  constexpr int kPairs = 200;
  constexpr double kSafety = 1.05;

  RemainderReport rep;
  rep.L_hat = lipschitz_estimate(problem, x, radius, p, kPairs, seed);
  const ModelCenter center = ModelCenter::build(problem.smooth, x, p);
  NormalStream rng(seed ^ 0x9e3779b97f4a7c15ULL);
  rep.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Vector y = sample_ball(rng, x, radius);
    const double Fy = problem.smooth.value(y);
    const double Ty = taylor_value(center, y);
    const double rem = std::abs(Fy - Ty);
    const double r = (y - x).norm();
    const double bound = kSafety * rep.L_hat / factorial(p + 1) * std::pow(r, p + 1);
    // both F and T_p carry rounding of order eps * magnitude
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(Fy) + std::abs(Ty) + std::abs(center.fx));
    rep.margin = std::min(rep.margin, bound + slack - rem);
    if (bound > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, rem / (bound / kSafety));
  }
  rep.passed = rep.margin >= 0.0;
  return rep;
}

ReferenceAudit audit_reference(const IterateTrace& trace, double rel_slack) {
  ReferenceAudit a;
  a.worst_violation = -std::numeric_limits<double>::infinity();
  if (trace.rows.empty()) return a;
  const double coef = trace.u_min * trace.Mtilde / factorial(trace.p + 1);
  const double f0 = trace.rows.front().f;
  auto note = [&a](bool& flag, double excess, int row) {
    a.worst_violation = std::max(a.worst_violation, excess);
    if (excess > 0.0) {
      flag = false;
      if (a.first_bad_row < 0) a.first_bad_row = row;
    }
  };
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    const double slack = rel_slack * std::max(1.0, std::abs(r.R));
    note(a.R_dominates_f, r.f - r.R - slack, r.k);
    note(a.level_set, r.f - f0 - rel_slack * std::max(1.0, std::abs(f0)), r.k);
    if (i > 0) {
      const TraceRow& prev = trace.rows[i - 1];
      const double prev_slack = rel_slack * std::max(1.0, std::abs(prev.R));
      note(a.R_nonincreasing, r.R - prev.R - prev_slack, r.k);
      note(a.sufficient_decrease,
           r.R - (prev.R - coef * std::pow(r.step_norm, trace.p + 1)) - prev_slack, r.k);
      if (!r.certified) {
        a.steps_certified = false;
        if (a.first_bad_row < 0) a.first_bad_row = r.k;
      }
    }
  }
  return a;
}

}  // namespace nhota
