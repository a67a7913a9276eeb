#include <doctest.h>

#include <cmath>
#include <random>

#include "nhota/core.hpp"
#include "nhota/reference_oracles.hpp"

using nhota::Vector;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("prox_l1 closed form") {
  CHECK(nhota::prox_l1(vec({3.0, -0.5, 0.0}), 1.0) == vec({2.0, 0.0, 0.0}));
  const Vector v = vec({0.3, -2.0, 1e-3, 0.0});
  CHECK((nhota::prox_l1(v, 1e-300) - v).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("prox_l1 agrees with a brute-force grid in 1-D") {
  // minimize 0.5|y| + (y - 0.7)^2 / 2 over [-2, 2]
  const double grid = nhota::reference::grid_prox_1d(0.7, 0.5, -2.0, 2.0, 1e-4);
  CHECK(std::abs(grid - 0.2) <= 2e-4);
  CHECK(std::abs(nhota::prox_l1(vec({0.7}), 0.5)[0] - 0.2) <= 1e-15);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1.5);
  std::uniform_real_distribution<double> ud(0.01, 1.5);
  for (int i = 0; i < 50; ++i) {
    const double v = nd(rng), tau = ud(rng);
    const double g = nhota::reference::grid_prox_1d(v, tau, -6.0, 6.0, 1e-4);
    CHECK(std::abs(nhota::prox_l1(vec({v}), tau)[0] - g) <= 2e-4);
  }
}

TEST_CASE("prox_l1 rejects a non-positive step") {
  CHECK_THROWS_AS(nhota::prox_l1(vec({1.0}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nhota::prox_l1(vec({1.0}), -1.0), std::invalid_argument);
}

TEST_CASE("prox_l1 properties") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto draw = [&](int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
  };
  for (int t = 0; t < 200; ++t) {
    const Vector u = draw(4), v = draw(4);
    const double tau = 0.05 + std::abs(nd(rng));
    const Vector pu = nhota::prox_l1(u, tau), pv = nhota::prox_l1(v, tau);
    CHECK((pu - pv).norm() <= (u - v).norm() + 1e-14);
    // (u - prox(u)) / tau is a subgradient of |.|_1 at prox(u)
    const Vector w = (u - pu) / tau;
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(w[i]) <= 1.0 + 1e-12);
      if (pu[i] != 0.0) CHECK(std::abs(w[i] - std::copysign(1.0, pu[i])) <= 1e-12);
    }
  }
}

TEST_CASE("subdiff_dist_l1 examples") {
  CHECK(nhota::subdiff_dist_l1(vec({-0.5, 0.2}), vec({2.0, 0.0}), 0.5) == 0.0);
  CHECK(nhota::subdiff_dist_l1(vec({1.0}), vec({1.0}), 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(nhota::subdiff_dist_l1(vec({0.8}), vec({0.0}), 0.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(nhota::subdiff_dist_l1(vec({1.0, 2.0}), vec({1.0}), 0.5), std::invalid_argument);
}

TEST_CASE("subdiff_dist_l1 agrees with grid enumeration for n <= 3") {
  // data on a 1/64 lattice so the minimizing subgradient lies on the grid
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.5);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 1 + trial % 3;
    const double lambda = 0.25 * (1 + trial % 4);
    Vector g(n), x(n);
    for (int i = 0; i < n; ++i) {
      const int k = pick(rng);
      x[i] = k == 0 ? 0.0 : (k == 1 ? 0.5 : -2.0);
      g[i] = std::round(nd(rng) * 64.0) / 64.0 * lambda;
    }
    const double grid = nhota::reference::grid_subdiff_dist(g, x, lambda, 1.0 / 64.0);
    CHECK(std::abs(grid - nhota::subdiff_dist_l1(g, x, lambda)) <= 1e-10);
  }
}

TEST_CASE("l1 term and zero term") {
  const auto h = nhota::l1_term(0.5);
  CHECK(h.value(vec({1.0, -2.0})) == 1.5);
  CHECK(h.has_subdiff_dist());
  CHECK(h.prox(vec({0.7}), 1.0)[0] == doctest::Approx(0.2));

  const auto z = nhota::zero_term();
  CHECK(z.value(vec({5.0})) == 0.0);
  CHECK(z.prox(vec({5.0, -1.0}), 3.0) == vec({5.0, -1.0}));
  // h = 0: the distance is |g|
  CHECK(z.subdiff_dist(vec({3.0, 4.0}), vec({1.0, 1.0})) == doctest::Approx(5.0));
}

TEST_CASE("CompositeProblem validation") {
  nhota::CompositeProblem p;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.smooth.dim = 2;
  p.smooth.order = 2;
  p.smooth.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.smooth.gradient = [](const Vector& x) { return x; };
  p.nonsmooth = nhota::zero_term();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);  // no Hessian for order 2
  p.smooth.hessian = [](const Vector&) { return nhota::Matrix::Identity(2, 2); };
  CHECK_NOTHROW(p.validate());
  CHECK(p.objective(vec({1.0, 1.0})) == 1.0);
}

TEST_CASE("all_finite") {
  CHECK(nhota::all_finite(vec({1.0, 2.0})));
  CHECK_FALSE(nhota::all_finite(vec({1.0, std::nan("")})));
  CHECK_FALSE(nhota::all_finite(vec({HUGE_VAL})));
}
