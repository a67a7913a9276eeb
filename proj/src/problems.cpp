#include "nhota/problems.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nhota {

double NormalStream::uniform() {
  // 53 random bits, shifted off zero so log() below is finite
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NormalStream::normal(double mean, double stddev) {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

PhaseRetrievalData gen_phase_retrieval_data(int n, int m, std::uint64_t seed, double noise_scale,
                                            double lambda, double signal_variance) {
  if (n < 1 || m < 1) throw std::invalid_argument("gen_phase_retrieval: n and m must be >= 1");
  if (noise_scale < 0.0 || lambda < 0.0 || !(signal_variance > 0.0))
    throw std::invalid_argument("gen_phase_retrieval: bad scale parameters");
  NormalStream rng(seed);
  const double sd = std::sqrt(signal_variance);

  PhaseRetrievalData d;
  d.seed = seed;
  d.noise_scale = noise_scale;
  d.lambda = lambda;
  d.signal_variance = signal_variance;
  d.A.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) d.A(i, j) = rng.normal(0.0, sd);
  d.z.resize(n);
  for (int j = 0; j < n; ++j) d.z[j] = rng.normal(0.0, sd);
  d.noise.resize(m);
  for (int i = 0; i < m; ++i) d.noise[i] = noise_scale * rng.normal(0.0, 1.0);
  d.x0.resize(n);
  for (int j = 0; j < n; ++j) d.x0[j] = rng.normal(0.0, 1.0);
  d.y = (d.A * d.z).array().square().matrix() + d.noise;
  return d;
}

PhaseOracleOutput phase_oracle(const PhaseRetrievalData& data, const Vector& x, Derivative order) {
  if (x.size() != data.A.cols()) throw std::invalid_argument("phase_oracle: dimension mismatch");
  const double m = static_cast<double>(data.A.rows());
  const Vector r = data.A * x;
  const Vector e = r.array().square().matrix() - data.y;

  PhaseOracleOutput out;
  out.value = e.squaredNorm() / (2.0 * m);
  if (order >= Derivative::gradient)
    out.gradient = (2.0 / m) * (data.A.transpose() * e.cwiseProduct(r));
  if (order >= Derivative::hessian) {
    const Vector w = (2.0 / m) * (3.0 * r.array().square() - data.y.array()).matrix();
    out.hessian = data.A.transpose() * w.asDiagonal() * data.A;
    // symmetric up to rounding; make it exact
    out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
  }
  return out;
}

CompositeProblem phase_retrieval_problem(const PhaseRetrievalData& data) {
  // shared so copies of the problem stay cheap
  auto shared = std::make_shared<const PhaseRetrievalData>(data);
  CompositeProblem prob;
  prob.smooth.dim = data.n();
  prob.smooth.order = 2;
  prob.smooth.value = [shared](const Vector& x) {
    return phase_oracle(*shared, x, Derivative::value).value;
  };
  prob.smooth.gradient = [shared](const Vector& x) {
    return phase_oracle(*shared, x, Derivative::gradient).gradient;
  };
  prob.smooth.hessian = [shared](const Vector& x) {
    return phase_oracle(*shared, x, Derivative::hessian).hessian;
  };
  prob.nonsmooth = l1_term(data.lambda);
  return prob;
}

PhaseRetrieval gen_phase_retrieval(int n, int m, std::uint64_t seed, double noise_scale,
                                   double lambda, double signal_variance) {
  PhaseRetrieval out;
  out.data = gen_phase_retrieval_data(n, m, seed, noise_scale, lambda, signal_variance);
  out.problem = phase_retrieval_problem(out.data);
  out.x0 = out.data.x0;
  return out;
}

std::uint64_t data_hash(const PhaseRetrievalData& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const double* p, Eigen::Index count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  feed(data.A.data(), data.A.size());
  feed(data.y.data(), data.y.size());
  return h;
}

namespace {

void write_vector(const std::filesystem::path& file, const Vector& v) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << '\n';
}

Vector read_vector(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(std::stod(line));
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

void save_phase_retrieval(const PhaseRetrievalData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream meta(dir / "meta.txt");
    if (!meta) throw std::runtime_error("cannot write " + (dir / "meta.txt").string());
    meta.precision(17);
    meta << "n=" << data.n() << "\nm=" << data.m() << "\nseed=" << data.seed
         << "\nnoise_scale=" << data.noise_scale << "\nlambda=" << data.lambda
         << "\nsignal_variance=" << data.signal_variance << '\n';
  }
  {
    std::ofstream a(dir / "A.csv");
    if (!a) throw std::runtime_error("cannot write " + (dir / "A.csv").string());
    a.precision(17);
    for (Eigen::Index i = 0; i < data.A.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.A.cols(); ++j) a << (j ? "," : "") << data.A(i, j);
      a << '\n';
    }
  }
  write_vector(dir / "y.csv", data.y);
  write_vector(dir / "z.csv", data.z);
  write_vector(dir / "noise.csv", data.noise);
  write_vector(dir / "x0.csv", data.x0);
}

PhaseRetrievalData load_phase_retrieval(const std::filesystem::path& dir) {
  std::map<std::string, std::string> meta;
  {
    std::ifstream in(dir / "meta.txt");
    if (!in) throw std::runtime_error("cannot read " + (dir / "meta.txt").string());
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) meta[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  auto get = [&meta](const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw std::runtime_error("meta.txt lacks key " + key);
    return it->second;
  };
  PhaseRetrievalData d;
  const int n = std::stoi(get("n"));
  const int m = std::stoi(get("m"));
  d.seed = std::stoull(get("seed"));
  d.noise_scale = std::stod(get("noise_scale"));
  d.lambda = std::stod(get("lambda"));
  d.signal_variance = std::stod(get("signal_variance"));

  std::ifstream a(dir / "A.csv");
  if (!a) throw std::runtime_error("cannot read " + (dir / "A.csv").string());
  d.A.resize(m, n);
  std::string line;
  for (int i = 0; i < m; ++i) {
    if (!std::getline(a, line)) throw std::runtime_error("A.csv has too few rows");
    std::istringstream cells(line);
    std::string cell;
    for (int j = 0; j < n; ++j) {
      if (!std::getline(cells, cell, ',')) throw std::runtime_error("A.csv has too few columns");
      d.A(i, j) = std::stod(cell);
    }
  }
  d.y = read_vector(dir / "y.csv");
  d.z = read_vector(dir / "z.csv");
  d.noise = read_vector(dir / "noise.csv");
  d.x0 = read_vector(dir / "x0.csv");
  if (d.y.size() != m || d.noise.size() != m || d.z.size() != n || d.x0.size() != n)
    throw std::runtime_error("phase retrieval bundle has inconsistent sizes");
  return d;
}

CompositeProblem diag_quad_problem(const DiagQuadL1Data& data) {
  if (data.d.size() != data.c.size() || data.d.size() == 0)
    throw std::invalid_argument("diag_quad: d and c must be nonempty and the same size");
  if ((data.d.array() <= 0.0).any()) throw std::invalid_argument("diag_quad: curvatures must be positive");
  auto shared = std::make_shared<const DiagQuadL1Data>(data);
  CompositeProblem prob;
  prob.smooth.dim = static_cast<int>(data.d.size());
  prob.smooth.order = 2;
  prob.smooth.value = [shared](const Vector& x) {
    return 0.5 * (shared->d.array() * (x - shared->c).array().square()).sum();
  };
  prob.smooth.gradient = [shared](const Vector& x) -> Vector {
    return shared->d.cwiseProduct(x - shared->c);
  };
  prob.smooth.hessian = [shared](const Vector&) -> Matrix { return shared->d.asDiagonal(); };
  prob.nonsmooth = l1_term(data.lambda);
  const DiagSolution sol = exact_solution_diag(data);
  prob.known_opt = KnownOptimum{sol.x, sol.f};
  return prob;
}

DiagSolution exact_solution_diag(const DiagQuadL1Data& data) {
  if ((data.d.array() <= 0.0).any()) throw std::invalid_argument("diag_quad: curvatures must be positive");
  DiagSolution s;
  const Eigen::Index n = data.d.size();
  s.x.resize(n);
  double F = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::abs(data.c[i]) - data.lambda / data.d[i];
    s.x[i] = mag > 0.0 ? std::copysign(mag, data.c[i]) : 0.0;
    F += 0.5 * data.d[i] * (s.x[i] - data.c[i]) * (s.x[i] - data.c[i]);
  }
  s.f = F + data.lambda * s.x.lpNorm<1>();
  return s;
}

DiagQuadL1 gen_diag_quad(int n, std::uint64_t seed, double lambda, double d_min, double d_max) {
  if (n < 1) throw std::invalid_argument("gen_diag_quad: n must be >= 1");
  if (!(d_min > 0.0) || d_max < d_min) throw std::invalid_argument("gen_diag_quad: bad curvature range");
  NormalStream rng(seed);
  DiagQuadL1 out;
  out.data.lambda = lambda;
  out.data.d.resize(n);
  for (int i = 0; i < n; ++i) out.data.d[i] = d_min + (d_max - d_min) * rng.uniform();
  out.data.c.resize(n);
  for (int i = 0; i < n; ++i) out.data.c[i] = rng.normal(0.0, 1.0);
  out.x0.resize(n);
  for (int i = 0; i < n; ++i) out.x0[i] = rng.normal(0.0, 1.0);
  out.problem = diag_quad_problem(out.data);
  return out;
}

}  // namespace nhota
