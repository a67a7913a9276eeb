// Brute-force reference computations used to verify the fast paths: grid
// searches and central finite differences. Nothing here shares code with
// the routines it checks.
#pragma once

#include "nhota/core.hpp"

#include <functional>

namespace nhota::reference {

/// argmin over the grid lo, lo + step, ..., hi of tau |y| + (y - v)^2 / 2.
double grid_prox_1d(double v, double tau, double lo, double hi, double step);

/// min |g + lambda s| over the product grid of the subdifferential of |.|_1
/// at x: s_i = sign(x_i) when x_i != 0, otherwise s_i in {-1, -1 + step, ..., 1}.
/// Enumerates the full product, so keep dim(x) <= 3.
double grid_subdiff_dist(const Vector& g, const Vector& x, double lambda, double step);

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// Central differences of the gradient, symmetrized.
Matrix fd_hessian(const std::function<Vector(const Vector&)>& grad, const Vector& x, double h);

/// max_i |a_i - b_i| / max(1, max_i |b_i|)
double relative_error(const Vector& a, const Vector& b);
double relative_error(const Matrix& a, const Matrix& b);

}  // namespace nhota::reference
