// Instruments for checking convergence behaviour: the exact stationarity
// measure, log-log rate fits, a linear-vs-sublinear classifier for the gap
// sequence, and a sampled Taylor-remainder diagnostic.
#pragma once

#include "nhota/core.hpp"
#include "nhota/driver.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nhota {

/// dist(0, grad F(x) + dh(x)). Throws CapabilityError if h cannot compute it.
double stationarity(const CompositeProblem& problem, const Vector& x);

/// Inclusive index range into a series indexed by iteration k.
struct Window {
  int first = 0;
  int last = 0;
  int length() const { return last - first + 1; }
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  Window window;
};

/// Least squares of log(series[k]) against log(k) over the window. Needs
/// first >= 1, at least 5 points and strictly positive entries.
RateFit rate_fit(std::span<const double> series, Window window);

/// Fits on the default window: iterations 0..2 are dropped as transient,
/// and everything after `stop_index` (inclusive end) is ignored.
RateFit rate_fit(std::span<const double> series, int stop_index);

/// min_{i <= k} series[i]
std::vector<double> prefix_min(std::span<const double> series);

/// Ordinary least squares y = a + b x; returns {b, a, r2}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

enum class RateShape { linear, sublinear, inconclusive };
const char* to_string(RateShape s);

struct KlProbe {
  RateShape shape = RateShape::inconclusive;
  double rho = 0.0;   // geometric ratio, delta_k ~ rho^k
  double beta = 0.0;  // power exponent, delta_k ~ k^-beta
  double r2_linear = 0.0;
  double r2_power = 0.0;
  Window window;
  std::string note;
};

/// Classifies delta_k = f(x_k) - f_star as geometric or power-law decay by
/// comparing goodness of fit. The band |r2_linear - r2_power| < 0.02 is
/// reported as inconclusive.
KlProbe kl_probe(std::span<const double> f_values, double f_star);
KlProbe kl_probe(const IterateTrace& trace, double f_star);

struct RemainderReport {
  bool passed = false;
  double margin = 0.0;  // min over samples of bound - |remainder|
  double L_hat = 0.0;
  double worst_ratio = 0.0;  // max |remainder| / (L_hat |y-x|^{p+1} / (p+1)!)
};

/// Estimates the Lipschitz constant of D^p F on the ball B(x, radius) from
/// 200 sampled pairs, then checks |F(y) - T_p(y; x)| <= 1.05 L_hat/(p+1)!
/// |y - x|^{p+1} on `samples` fresh points of the ball.
RemainderReport remainder_check(const CompositeProblem& problem, const Vector& x, double radius,
                                int samples, int p, std::uint64_t seed = 1);

/// Empirical Lipschitz estimate of D^p F on the ball, from `pairs` pairs.
double lipschitz_estimate(const CompositeProblem& problem, const Vector& x, double radius, int p,
                          int pairs, std::uint64_t seed);

/// Worst-case audit of a trace against the reference-value invariants:
/// R_k nonincreasing, R_k >= f(x_k), the sufficient decrease
/// R_{k+1} <= R_k - u_min Mtilde/(p+1)! |step|^{p+1}, and f(x_k) <= f(x_0).
/// Every comparison gets slack `rel_slack * max(1, |R_k|)`.
struct ReferenceAudit {
  bool R_nonincreasing = true;
  bool R_dominates_f = true;
  bool sufficient_decrease = true;
  bool level_set = true;
  bool steps_certified = true;
  double worst_violation = 0.0;  // largest (lhs - rhs - slack) seen, <= 0 when clean
  int first_bad_row = -1;

  bool ok() const {
    return R_nonincreasing && R_dominates_f && sufficient_decrease && level_set && steps_certified;
  }
};

ReferenceAudit audit_reference(const IterateTrace& trace, double rel_slack = 1e-9);

}  // namespace nhota
