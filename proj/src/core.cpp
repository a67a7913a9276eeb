#include "nhota/core.hpp"

#include <cmath>

namespace nhota {

bool all_finite(const Vector& v) { return v.allFinite(); }

void CompositeProblem::validate() const {
  if (smooth.dim <= 0) throw std::invalid_argument("smooth oracle dimension must be positive");
  if (smooth.order < 1 || smooth.order > 2)
    throw std::invalid_argument("smooth oracle order must be 1 or 2");
  if (!smooth.value || !smooth.gradient)
    throw std::invalid_argument("smooth oracle needs value and gradient callbacks");
  if (smooth.order == 2 && !smooth.hessian)
    throw std::invalid_argument("order-2 oracle needs a hessian callback");
  if (!nonsmooth.value || !nonsmooth.prox)
    throw std::invalid_argument("nonsmooth term needs value and prox callbacks");
  if (known_opt && known_opt->x.size() != smooth.dim)
    throw std::invalid_argument("known optimum has wrong dimension");
}

Vector prox_l1(const Vector& v, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_l1: tau must be positive");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

double subdiff_dist_l1(const Vector& g, const Vector& x, double lambda) {
  if (g.size() != x.size()) throw std::invalid_argument("subdiff_dist_l1: dimension mismatch");
  if (lambda < 0.0) throw std::invalid_argument("subdiff_dist_l1: lambda must be nonnegative");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double r;
    if (x[i] != 0.0) {
      r = g[i] + std::copysign(lambda, x[i]);
    } else {
      // distance from -g_i to [-lambda, lambda]
      r = std::max(std::abs(g[i]) - lambda, 0.0);
    }
    sum += r * r;
  }
  return std::sqrt(sum);
}

NonsmoothTerm l1_term(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("l1_term: lambda must be nonnegative");
  NonsmoothTerm h;
  h.name = "l1";
  h.value = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
  h.prox = [lambda](const Vector& v, double tau) -> Vector {
    if (!(tau > 0.0)) throw std::invalid_argument("prox: tau must be positive");
    if (lambda == 0.0) return v;
    return prox_l1(v, lambda * tau);
  };
  h.subdiff_dist = [lambda](const Vector& g, const Vector& x) {
    return subdiff_dist_l1(g, x, lambda);
  };
  return h;
}

NonsmoothTerm zero_term() {
  NonsmoothTerm h;
  h.name = "zero";
  h.value = [](const Vector&) { return 0.0; };
  h.prox = [](const Vector& v, double tau) -> Vector {
    if (!(tau > 0.0)) throw std::invalid_argument("prox: tau must be positive");
    return v;
  };
  h.subdiff_dist = [](const Vector& g, const Vector& x) {
    if (g.size() != x.size()) throw std::invalid_argument("subdiff_dist: dimension mismatch");
    return g.norm();
  };
  return h;
}

}  // namespace nhota
