#include "nhota/taylor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nhota {

namespace {

void check_dim(const ModelCenter& c, const Vector& y) {
  if (y.size() != c.x.size())
    throw std::invalid_argument("taylor: point has dimension " + std::to_string(y.size()) +
                                ", center has " + std::to_string(c.x.size()));
}

void check_M(double M) {
  if (!(M > 0.0)) throw std::invalid_argument("model: M must be positive");
}

}  // namespace

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

ModelCenter ModelCenter::build(const SmoothOracle& oracle, const Vector& x, int p) {
  if (p < 1 || p > 2) throw std::invalid_argument("ModelCenter: p must be 1 or 2");
  if (p > oracle.order)
    throw CapabilityError("ModelCenter: order " + std::to_string(p) +
                          " requested from an order-" + std::to_string(oracle.order) + " oracle");
  ModelCenter c;
  c.x = x;
  c.p = p;
  c.fx = oracle.value(x);
  c.gx = oracle.gradient(x);
  if (!std::isfinite(c.fx) || !c.gx.allFinite())
    throw OracleError("non-finite value or gradient at model center");
  if (p == 2) {
    c.hx = oracle.hessian(x);
    if (!c.hx->allFinite()) throw OracleError("non-finite Hessian at model center");
  }
  return c;
}

double taylor_value(const ModelCenter& c, const Vector& y) {
  check_dim(c, y);
  const Vector s = y - c.x;
  double v = c.fx + c.gx.dot(s);
  if (c.p == 2) v += 0.5 * s.dot(*c.hx * s);
  return v;
}

Vector taylor_grad(const ModelCenter& c, const Vector& y) {
  check_dim(c, y);
  if (c.p == 2) return c.gx + *c.hx * (y - c.x);
  return c.gx;
}

double model_value(const ModelCenter& c, const Vector& y, double M) {
  check_M(M);
  const double r = (y - c.x).norm();
  return taylor_value(c, y) + M / factorial(c.p + 1) * std::pow(r, c.p + 1);
}

Vector model_grad(const ModelCenter& c, const Vector& y, double M) {
  check_M(M);
  Vector g = taylor_grad(c, y);
  const Vector s = y - c.x;
  // |s|^{p-1} s, with |s|^0 = 1 so that p = 1 gives M s
  const double scale = c.p == 1 ? 1.0 : std::pow(s.norm(), c.p - 1);
  g.noalias() += (M / factorial(c.p) * scale) * s;
  return g;
}

double model_bregman(const ModelCenter& c, const Vector& y, const Vector& z, double M) {
  check_M(M);
  check_dim(c, y);
  check_dim(c, z);
  const Vector d = z - y;
  const double e = d.squaredNorm();
  double out = 0.0;
  if (c.p == 2) out += 0.5 * d.dot(*c.hx * d);

  const double coef = M / factorial(c.p + 1);
  if (c.p == 1) return out + coef * e;

  // cubic regularizer: with a = |y - x|, b = |z - x|, t = <y - x, d>,
  //   b^3 - a^3 - 3 a t = [t (2t + e)(2b + a)/(a + b) + e (a^2 + ab + b^2)] / (a + b)
  // which has no cancellation when |d| << a.
  const double a = (y - c.x).norm();
  const double b = (z - c.x).norm();
  if (a + b == 0.0) return out;
  const double t = (y - c.x).dot(d);
  const double cubic = (t * (2.0 * t + e) * (2.0 * b + a) / (a + b) + e * (a * a + a * b + b * b)) / (a + b);
  return out + coef * cubic;
}

}  // namespace nhota
