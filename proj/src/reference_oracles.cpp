#include "nhota/reference_oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nhota::reference {

double grid_prox_1d(double v, double tau, double lo, double hi, double step) {
  double best_y = lo;
  double best = std::numeric_limits<double>::infinity();
  const long count = std::lround((hi - lo) / step);
  for (long i = 0; i <= count; ++i) {
    const double y = lo + static_cast<double>(i) * step;
    const double obj = tau * std::abs(y) + 0.5 * (y - v) * (y - v);
    if (obj < best) {
      best = obj;
      best_y = y;
    }
  }
  return best_y;
}

double grid_subdiff_dist(const Vector& g, const Vector& x, double lambda, double step) {
  if (g.size() != x.size() || x.size() > 3) throw std::invalid_argument("grid_subdiff_dist: need n <= 3");
  std::vector<std::vector<double>> choices(static_cast<std::size_t>(x.size()));
  const long count = std::lround(2.0 / step);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) choices[i] = {1.0};
    else if (x[i] < 0.0) choices[i] = {-1.0};
    else
      for (long j = 0; j <= count; ++j) choices[i].push_back(-1.0 + static_cast<double>(j) * step);
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(choices.size(), 0);
  for (;;) {
    double sq = 0.0;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      const double r = g[static_cast<Eigen::Index>(i)] + lambda * choices[i][idx[i]];
      sq += r * r;
    }
    best = std::min(best, sq);
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == choices[d].size()) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return std::sqrt(best);
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

Matrix fd_hessian(const std::function<Vector(const Vector&)>& grad, const Vector& x, double h) {
  const Eigen::Index n = x.size();
  Matrix H(n, n);
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    H.col(i) = (grad(xp) - grad(xm)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  return 0.5 * (H + H.transpose());
}

double relative_error(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace nhota::reference
