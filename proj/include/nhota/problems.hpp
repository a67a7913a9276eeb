// Seeded test problems: l1-regularized phase retrieval and a separable
// diagonal quadratic + l1 family with a closed-form minimizer.
//
// Random streams come from std::mt19937_64 (fully specified by the C++
// standard). Normals use the Box-Muller cosine branch on two 53-bit
// uniforms, so every platform draws the same numbers. Fill order for phase
// retrieval: A row-major, then z, then the noise, then x0.
#pragma once

#include "nhota/core.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace nhota {

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // in (0, 1)
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

struct PhaseRetrievalData {
  Matrix A;  // m x n, rows are the sensing vectors
  Vector y;
  Vector z;
  Vector noise;
  Vector x0;
  double lambda = 1e-5;
  std::uint64_t seed = 0;
  double noise_scale = 0.0;
  double signal_variance = 0.5;

  int n() const { return static_cast<int>(A.cols()); }
  int m() const { return static_cast<int>(A.rows()); }
};

struct PhaseRetrieval {
  CompositeProblem problem;
  PhaseRetrievalData data;
  Vector x0;
};

/// a_i, z ~ N(0, signal_variance) elementwise, x0 ~ N(0, 1), noise
/// n_i ~ noise_scale * N(0, 1).
PhaseRetrievalData gen_phase_retrieval_data(int n, int m, std::uint64_t seed, double noise_scale,
                                            double lambda, double signal_variance = 0.5);

PhaseRetrieval gen_phase_retrieval(int n, int m, std::uint64_t seed, double noise_scale,
                                   double lambda, double signal_variance = 0.5);

/// Wraps existing data (e.g. loaded from disk) as a composite problem.
CompositeProblem phase_retrieval_problem(const PhaseRetrievalData& data);

enum class Derivative { value = 0, gradient = 1, hessian = 2 };

struct PhaseOracleOutput {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

/// F(x) = 1/(2m) sum (y_i - (a_i^T x)^2)^2 and its derivatives up to `order`,
/// in one pass over the rows.
PhaseOracleOutput phase_oracle(const PhaseRetrievalData& data, const Vector& x, Derivative order);

/// FNV-1a over the bytes of A and y; identical data gives identical hashes.
std::uint64_t data_hash(const PhaseRetrievalData& data);

/// Bundle layout in `dir`: meta.txt (key=value), A.csv (m rows, n columns),
/// y.csv, z.csv, noise.csv, x0.csv (one value per line). Values are
/// written with 17 significant digits so a reload is bit-identical.
void save_phase_retrieval(const PhaseRetrievalData& data, const std::filesystem::path& dir);
PhaseRetrievalData load_phase_retrieval(const std::filesystem::path& dir);

struct DiagQuadL1Data {
  Vector d;  // curvatures, all positive
  Vector c;  // centers
  double lambda = 0.0;
};

struct DiagQuadL1 {
  CompositeProblem problem;
  DiagQuadL1Data data;
  Vector x0;
};

/// F(x) = 1/2 sum d_i (x_i - c_i)^2, h = lambda |x|_1, with known optimum.
CompositeProblem diag_quad_problem(const DiagQuadL1Data& data);

/// d_i ~ U[d_min, d_max], c_i ~ N(0, 1), x0 ~ N(0, 1), drawn in that order.
DiagQuadL1 gen_diag_quad(int n, std::uint64_t seed, double lambda, double d_min = 1.0,
                         double d_max = 10.0);

struct DiagSolution {
  Vector x;
  double f = 0.0;
};

DiagSolution exact_solution_diag(const DiagQuadL1Data& data);

}  // namespace nhota
