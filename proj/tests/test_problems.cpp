#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "nhota/problems.hpp"
#include "nhota/reference_oracles.hpp"

using nhota::Matrix;
using nhota::Vector;

namespace {

// straightforward double loop over rows and coordinates
Matrix reference_hessian(const nhota::PhaseRetrievalData& d, const Vector& x) {
  const int n = d.n(), m = d.m();
  Matrix H = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    double ax = 0.0;
    for (int j = 0; j < n; ++j) ax += d.A(i, j) * x[j];
    const double w = (6.0 * ax * ax - 2.0 * d.y[i]) / m;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) H(j, l) += w * d.A(i, j) * d.A(i, l);
  }
  return H;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nhota_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("normal stream is deterministic and roughly standard") {
  nhota::NormalStream a(42), b(42);
  double sum = 0.0, sq = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    const double x = a.normal(0.0, 1.0);
    CHECK(x == b.normal(0.0, 1.0));
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / N) < 0.03);
  CHECK(std::abs(sq / N - 1.0) < 0.03);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("phase retrieval generation is deterministic") {
  const auto a = nhota::gen_phase_retrieval_data(8, 40, 5, 1.0, 1e-5);
  const auto b = nhota::gen_phase_retrieval_data(8, 40, 5, 1.0, 1e-5);
  CHECK(a.A == b.A);
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(a.x0 == b.x0);
  CHECK(nhota::data_hash(a) == nhota::data_hash(b));
  const auto c = nhota::gen_phase_retrieval_data(8, 40, 6, 1.0, 1e-5);
  CHECK(nhota::data_hash(a) != nhota::data_hash(c));
}

TEST_CASE("sensing entries have the configured variance") {
  const auto d = nhota::gen_phase_retrieval_data(50, 400, 1, 1.0, 1e-5);
  const double var = d.A.array().square().mean();
  CHECK(var == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("noiseless data vanishes at the signal") {
  const auto pr = nhota::gen_phase_retrieval(10, 60, 3, 0.0, 0.01);
  CHECK(pr.problem.smooth.value(pr.data.z) <= 1e-24);
  CHECK(pr.problem.objective(pr.data.z) == doctest::Approx(0.01 * pr.data.z.lpNorm<1>()).epsilon(1e-12));
  CHECK(pr.problem.smooth.gradient(pr.data.z).norm() <= 1e-12);
}

TEST_CASE("phase retrieval at the origin") {
  const auto pr = nhota::gen_phase_retrieval(7, 30, 4, 1.0, 1e-5);
  const Vector zero = Vector::Zero(7);
  CHECK(pr.problem.smooth.gradient(zero).norm() == 0.0);
  CHECK(pr.problem.smooth.value(zero) == doctest::Approx(pr.data.y.squaredNorm() / (2.0 * 30)));
}

TEST_CASE("phase retrieval derivatives") {
  const auto pr = nhota::gen_phase_retrieval(6, 40, 8, 1.0, 1e-5);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x[i] = nd(rng);
    const Matrix H = pr.problem.smooth.hessian(x);
    CHECK(nhota::reference::relative_error(H, reference_hessian(pr.data, x)) <= 1e-12);
    CHECK((H - H.transpose()).norm() == 0.0);
    CHECK(nhota::reference::relative_error(pr.problem.smooth.gradient(x),
                                           nhota::reference::fd_gradient(pr.problem.smooth.value, x, 1e-5)) <= 1e-5);
    CHECK(nhota::reference::relative_error(H, nhota::reference::fd_hessian(pr.problem.smooth.gradient, x, 1e-5)) <=
          1e-5);
    const auto one_pass = nhota::phase_oracle(pr.data, x, nhota::Derivative::hessian);
    CHECK(one_pass.value == pr.problem.smooth.value(x));
    CHECK(one_pass.gradient == pr.problem.smooth.gradient(x));
  }
}

TEST_CASE("bundle save and load round trip") {
  const auto d = nhota::gen_phase_retrieval_data(5, 20, 9, 0.3, 2e-3);
  const auto dir = temp_dir("bundle");
  nhota::save_phase_retrieval(d, dir);
  for (const char* f : {"meta.txt", "A.csv", "y.csv", "z.csv", "noise.csv", "x0.csv"})
    CHECK(std::filesystem::exists(dir / f));
  const auto back = nhota::load_phase_retrieval(dir);
  CHECK(back.A == d.A);
  CHECK(back.y == d.y);
  CHECK(back.z == d.z);
  CHECK(back.noise == d.noise);
  CHECK(back.x0 == d.x0);
  CHECK(back.lambda == d.lambda);
  CHECK(back.seed == d.seed);
  CHECK(nhota::data_hash(back) == nhota::data_hash(d));
  std::filesystem::remove_all(dir);
  CHECK_THROWS(nhota::load_phase_retrieval(dir));
}

TEST_CASE("diagonal quadratic closed form") {
  nhota::DiagQuadL1Data d{Vector::Constant(1, 1.0), Vector::Constant(1, 2.0), 0.5};
  auto sol = nhota::exact_solution_diag(d);
  CHECK(sol.x[0] == doctest::Approx(1.5));
  CHECK(sol.f == doctest::Approx(0.875));

  d = {Vector::Constant(3, 2.0), (Vector(3) << 1.0, -2.0, 0.5).finished(), 0.0};
  sol = nhota::exact_solution_diag(d);
  CHECK(sol.x == d.c);
  CHECK(sol.f == 0.0);

  d = {Vector::Constant(3, 2.0), Vector::Zero(3), 0.7};
  sol = nhota::exact_solution_diag(d);
  CHECK(sol.x == Vector::Zero(3));
  CHECK(sol.f == 0.0);
}

TEST_CASE("diagonal quadratic optimum beats random perturbations") {
  const auto dq = nhota::gen_diag_quad(12, 3, 0.4);
  const auto& opt = *dq.problem.known_opt;
  CHECK(opt.f == doctest::Approx(dq.problem.objective(opt.x)));
  CHECK(nhota::subdiff_dist_l1(dq.problem.smooth.gradient(opt.x), opt.x, 0.4) <= 1e-12);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (int t = 0; t < 500; ++t) {
    Vector y = opt.x;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += nd(rng);
    CHECK(dq.problem.objective(y) >= opt.f);
  }
  for (Eigen::Index i = 0; i < dq.data.d.size(); ++i) {
    CHECK(dq.data.d[i] >= 1.0);
    CHECK(dq.data.d[i] <= 10.0);
  }
}
