#include "nhota/inner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nhota {

namespace {

constexpr int kMaxHalvings = 100;
constexpr double kDegenerateStep = 1e-14;
constexpr double kDegenerateResidual = 1e-10;

double rounding_slack(double value) {
  return 1e-12 * std::max(1.0, std::abs(value));
}

}  // namespace

const char* to_string(InnerStatus s) {
  switch (s) {
    case InnerStatus::certified: return "certified";
    case InnerStatus::stationary: return "stationary";
    case InnerStatus::inner_failure: return "inner_failure";
    case InnerStatus::oracle_failure: return "oracle_failure";
  }
  return "unknown";
}

StepCertificate certify(const CompositeProblem& problem, const ModelCenter& center, const Vector& y,
                        double M, double theta, const Vector& witness) {
  StepCertificate cert;
  const double f_center = center.fx + problem.nonsmooth.value(center.x);
  const double m_y = model_value(center, y, M) + problem.nonsmooth.value(y);
  cert.decrease_ok = m_y <= f_center + rounding_slack(f_center);

  const Vector g = model_grad(center, y, M);
  if (problem.nonsmooth.has_subdiff_dist()) {
    cert.residual = problem.nonsmooth.subdiff_dist(g, y);
    cert.exact = true;
  } else {
    if (witness.size() != y.size())
      throw std::invalid_argument("certify: witness has wrong dimension");
    cert.residual = (g + witness).norm();
  }
  cert.witness_norm = (y - center.x).norm();
  cert.threshold = theta * std::pow(cert.witness_norm, center.p);
  return cert;
}

InnerResult solve_subproblem(const CompositeProblem& problem, const ModelCenter& center, double M,
                             double theta, const InnerLimits& limits, const Vector* warm_start) {
  if (!(M > 0.0)) throw std::invalid_argument("solve_subproblem: M must be positive");
  if (!(theta > 0.0)) throw std::invalid_argument("solve_subproblem: theta must be positive");
  if (limits.max_inner < 1 || !(limits.step_guess > 0.0))
    throw std::invalid_argument("solve_subproblem: bad inner limits");

  const auto& h = problem.nonsmooth;
  const double f_center = center.fx + h.value(center.x);
  const double x_norm = center.x.norm();

  InnerResult out;
  out.y = center.x;
  double m_smooth = center.fx;
  if (warm_start != nullptr && warm_start->size() == center.x.size() && warm_start->allFinite()) {
    const double m_warm = model_value(center, *warm_start, M);
    if (std::isfinite(m_warm) && m_warm + h.value(*warm_start) <= f_center) {
      out.y = *warm_start;
      m_smooth = m_warm;
    }
  }
  double m_total = m_smooth + h.value(out.y);

  double alpha = limits.step_guess;
  for (int t = 1; t <= limits.max_inner; ++t) {
    const Vector g = model_grad(center, out.y, M);

    Vector z;
    double m_z = 0.0;
    bool accepted = false;
    for (int j = 0; j < kMaxHalvings; ++j, alpha *= 0.5) {
      z = h.prox(out.y - alpha * g, alpha);
      m_z = model_value(center, z, M);
      if (!std::isfinite(m_z)) continue;
      // m(z) <= m(y) + <g, z - y> + |z - y|^2 / (2 alpha), in Bregman form
      const double gap = model_bregman(center, out.y, z, M);
      if (gap <= (z - out.y).squaredNorm() / (2.0 * alpha)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.status = InnerStatus::oracle_failure;
      out.cert.inner_iters = t;
      return out;
    }

    Vector witness = (out.y - z) / alpha - g;
    const double m_z_total = m_z + h.value(z);
    if (m_z_total > m_total + rounding_slack(m_total))
      throw std::logic_error("solve_subproblem: model increased along prox-gradient iterates");

    out.y = std::move(z);
    out.witness = std::move(witness);
    m_smooth = m_z;
    m_total = m_z_total;

    const Vector gz = model_grad(center, out.y, M);
    // the exact distance, when available, is what certify() will check
    const double residual = h.has_subdiff_dist() ? h.subdiff_dist(gz, out.y)
                                                 : (gz + out.witness).norm();
    const double step = (out.y - center.x).norm();
    const double threshold = theta * std::pow(step, center.p);

    if (residual <= threshold || (step <= kDegenerateStep * (1.0 + x_norm) &&
                                  residual <= kDegenerateResidual)) {
      out.cert = certify(problem, center, out.y, M, theta, out.witness);
      out.cert.inner_iters = t;
      out.status = residual <= threshold && step > kDegenerateStep * (1.0 + x_norm)
                       ? InnerStatus::certified
                       : InnerStatus::stationary;
      return out;
    }
    // let the step grow back after a run of halvings
    alpha = std::min(limits.step_guess, 2.0 * alpha);
  }

  out.cert = certify(problem, center, out.y, M, theta, out.witness);
  out.cert.inner_iters = limits.max_inner;
  out.status = InnerStatus::inner_failure;
  return out;
}

}  // namespace nhota
