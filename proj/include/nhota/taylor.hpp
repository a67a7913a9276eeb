// p-th order Taylor models of F and their regularized versions.
//
// For a center x the regularized model is
//
//   model(y) = T_p(y; x) + M / (p+1)! * |y - x|^{p+1}
//
// with no contribution from h; callers add h(y) at trial points.
#pragma once

#include "nhota/core.hpp"

#include <optional>

namespace nhota {

double factorial(int n);

/// Oracle data of F at a fixed center, computed once per outer iteration.
struct ModelCenter {
  Vector x;
  double fx = 0.0;
  Vector gx;
  std::optional<Matrix> hx;  // present iff p == 2
  int p = 1;

  /// Evaluates F, grad F (and the Hessian for p = 2) at x. Throws
  /// CapabilityError when p exceeds the oracle order and OracleError on
  /// non-finite output.
  static ModelCenter build(const SmoothOracle& oracle, const Vector& x, int p);

  int dim() const { return static_cast<int>(x.size()); }
};

double taylor_value(const ModelCenter& center, const Vector& y);
Vector taylor_grad(const ModelCenter& center, const Vector& y);

double model_value(const ModelCenter& center, const Vector& y, double M);
Vector model_grad(const ModelCenter& center, const Vector& y, double M);

/// model(z) - model(y) - <grad model(y), z - y>, evaluated without forming
/// the two model values, so it stays accurate when |z - y| is far below the
/// rounding level of F.
double model_bregman(const ModelCenter& center, const Vector& y, const Vector& z, double M);

}  // namespace nhota
