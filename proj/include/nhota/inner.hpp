// Inexact minimization of model(y) + h(y) by proximal gradient, plus the
// post-hoc certificate for the two acceptance conditions of a subproblem
// solution:
//
//   model(y) + h(y) <= f(x_k)
//   |grad model(y) + p| <= theta |y - x_k|^p   for some p in dh(y)
#pragma once

#include "nhota/core.hpp"
#include "nhota/taylor.hpp"

namespace nhota {

struct StepCertificate {
  bool decrease_ok = false;
  double residual = 0.0;   // stationarity residual of the model at y
  double threshold = 0.0;  // theta |y - x_k|^p
  double witness_norm = 0.0;  // |y - x_k|
  int inner_iters = 0;
  bool exact = false;  // residual is dist(0, grad model + dh(y)) rather than a witness bound

  bool valid() const { return decrease_ok && residual <= threshold; }
};

struct InnerLimits {
  int max_inner = 500;
  double step_guess = 1.0;
};

enum class InnerStatus {
  certified,       // both conditions hold
  stationary,      // y == x_k up to rounding with a vanishing residual
  inner_failure,   // max_inner exhausted
  oracle_failure,  // non-finite model value
};

const char* to_string(InnerStatus s);

struct InnerResult {
  Vector y;
  Vector witness;  // p in dh(y) produced by the last prox step
  StepCertificate cert;
  InnerStatus status = InnerStatus::inner_failure;
};

/// Proximal-gradient iterations on model(.; M) + h started at x_k (or at
/// `warm_start` when it already satisfies the decrease condition).
InnerResult solve_subproblem(const CompositeProblem& problem, const ModelCenter& center, double M,
                             double theta, const InnerLimits& limits,
                             const Vector* warm_start = nullptr);

/// Recomputes both conditions from raw oracle calls. When h exposes an exact
/// subdifferential distance that is used and `witness` is ignored; otherwise
/// the residual is |grad model(y) + witness|.
StepCertificate certify(const CompositeProblem& problem, const ModelCenter& center, const Vector& y,
                        double M, double theta, const Vector& witness);

}  // namespace nhota
