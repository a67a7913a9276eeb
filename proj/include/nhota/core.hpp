// Domain types shared by every module: vectors, the smooth/nonsmooth oracle
// contracts and the composite problem f = F + h.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace nhota {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an oracle produces NaN/Inf.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller asks for something an oracle does not provide
/// (a Hessian from a first-order oracle, an exact subdifferential distance
/// from an h that only exposes its prox).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Smooth part F. Callbacks must be pure; they may be invoked concurrently.
struct SmoothOracle {
  int dim = 0;
  int order = 1;  // highest derivative available, 1 or 2
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;  // required iff order == 2
};

/// Convex, proper, lsc nonsmooth part h.
struct NonsmoothTerm {
  std::function<double(const Vector&)> value;
  /// prox(v, tau) = argmin_y h(y) + |y - v|^2 / (2 tau)
  std::function<Vector(const Vector&, double)> prox;
  /// subdiff_dist(g, x) = dist(0, g + dh(x)). Empty when h cannot compute
  /// it exactly; callers then fall back to witness-based bounds.
  std::function<double(const Vector&, const Vector&)> subdiff_dist;
  std::string name = "custom";

  bool has_subdiff_dist() const { return static_cast<bool>(subdiff_dist); }
};

struct KnownOptimum {
  Vector x;
  double f = 0.0;
};

struct CompositeProblem {
  SmoothOracle smooth;
  NonsmoothTerm nonsmooth;
  std::optional<KnownOptimum> known_opt;

  int dim() const { return smooth.dim; }

  /// f(x) = F(x) + h(x)
  double objective(const Vector& x) const { return smooth.value(x) + nonsmooth.value(x); }

  /// Throws std::invalid_argument if the pieces are inconsistent.
  void validate() const;
};

bool all_finite(const Vector& v);

/// Coordinatewise soft threshold: sign(v_i) max(|v_i| - tau, 0).
Vector prox_l1(const Vector& v, double tau);

/// Exact dist(0, g + lambda * d|x|_1).
double subdiff_dist_l1(const Vector& g, const Vector& x, double lambda);

/// h(x) = lambda |x|_1 with exact prox and subdifferential distance.
NonsmoothTerm l1_term(double lambda);

/// h = 0.
NonsmoothTerm zero_term();

}  // namespace nhota
