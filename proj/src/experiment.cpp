#include "nhota/experiment.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>

#include "nhota/metrics.hpp"

namespace nhota {

ExperimentConfig::ExperimentConfig() {
  // stopping rules of the phase-retrieval experiment
  run.stop_f = 1e-3;
  run.stop_stat = 1e-3;
}

RunConfig ExperimentConfig::run_config(double u_value) const {
  RunConfig rc = run;
  rc.u.constant = u_value;
  rc.u.per_iteration = nullptr;
  rc.seed = seed;
  return rc;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf" || v == "off" || v == "none") return -std::numeric_limits<double>::infinity();
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || std::isnan(d))
    throw ConfigError("expected a number, got '" + v + "'", line);
  return d;
}

long long parse_int(const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("expected an integer, got '" + v + "'", line);
  return i;
}

int parse_count(const std::string& v, int line) {
  const long long i = parse_int(v, line);
  if (i < 0 || i > std::numeric_limits<int>::max()) throw ConfigError("count out of range: " + v, line);
  return static_cast<int>(i);
}

std::uint64_t parse_seed(const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("expected a nonnegative integer seed, got '" + v + "'", line);
  return s;
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'", line);
}

std::vector<double> parse_list(const std::string& v, int line) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(trim(item), line));
  if (out.empty()) throw ConfigError("expected a comma-separated list", line);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem",
       [](ExperimentConfig& c, const std::string& v, int l) {
         if (v == "phase_retrieval") c.problem = ProblemKind::phase_retrieval;
         else if (v == "diag_quad_l1") c.problem = ProblemKind::diag_quad_l1;
         else throw ConfigError("unknown problem '" + v + "'", l);
       }},
      {"n", [](ExperimentConfig& c, const std::string& v, int l) { c.n = parse_count(v, l); }},
      {"m", [](ExperimentConfig& c, const std::string& v, int l) { c.m = parse_count(v, l); }},
      {"seed", [](ExperimentConfig& c, const std::string& v, int l) { c.seed = parse_seed(v, l); }},
      {"lambda", [](ExperimentConfig& c, const std::string& v, int l) { c.lambda = parse_double(v, l); }},
      {"noise_scale",
       [](ExperimentConfig& c, const std::string& v, int l) { c.noise_scale = parse_double(v, l); }},
      {"noise_preset",
       [](ExperimentConfig& c, const std::string& v, int l) {
         // standard deviations of the two noise families and the scaled-down variant
         if (v == "5") c.noise_scale = 5.0;
         else if (v == "1") c.noise_scale = 1.0;
         else if (v == "0.01x5") c.noise_scale = 0.05;
         else throw ConfigError("noise_preset must be 5, 1 or 0.01x5", l);
       }},
      {"signal_variance",
       [](ExperimentConfig& c, const std::string& v, int l) { c.signal_variance = parse_double(v, l); }},
      {"data_dir", [](ExperimentConfig& c, const std::string& v, int) { c.data_dir = v; }},
      {"d_min", [](ExperimentConfig& c, const std::string& v, int l) { c.d_min = parse_double(v, l); }},
      {"d_max", [](ExperimentConfig& c, const std::string& v, int l) { c.d_max = parse_double(v, l); }},
      {"d", [](ExperimentConfig& c, const std::string& v, int l) { c.d = parse_list(v, l); }},
      {"c", [](ExperimentConfig& c, const std::string& v, int l) { c.c = parse_list(v, l); }},
      {"x0", [](ExperimentConfig& c, const std::string& v, int l) { c.x0 = parse_list(v, l); }},
      {"p", [](ExperimentConfig& c, const std::string& v, int l) { c.run.p = parse_count(v, l); }},
      {"M0", [](ExperimentConfig& c, const std::string& v, int l) { c.run.M0 = parse_double(v, l); }},
      {"Mtilde", [](ExperimentConfig& c, const std::string& v, int l) { c.run.Mtilde = parse_double(v, l); }},
      {"theta", [](ExperimentConfig& c, const std::string& v, int l) { c.run.theta = parse_double(v, l); }},
      {"u", [](ExperimentConfig& c, const std::string& v, int l) { c.u = parse_double(v, l); }},
      {"u_min", [](ExperimentConfig& c, const std::string& v, int l) { c.run.u_min = parse_double(v, l); }},
      {"u_list", [](ExperimentConfig& c, const std::string& v, int l) { c.u_list = parse_list(v, l); }},
      {"max_outer",
       [](ExperimentConfig& c, const std::string& v, int l) { c.run.max_outer = parse_count(v, l); }},
      {"stop_f", [](ExperimentConfig& c, const std::string& v, int l) { c.run.stop_f = parse_double(v, l); }},
      {"stop_stat",
       [](ExperimentConfig& c, const std::string& v, int l) { c.run.stop_stat = parse_double(v, l); }},
      {"stationary_floor",
       [](ExperimentConfig& c, const std::string& v, int l) { c.run.stationary_floor = parse_double(v, l); }},
      {"max_doublings",
       [](ExperimentConfig& c, const std::string& v, int l) { c.run.max_doublings = parse_count(v, l); }},
      {"max_inner",
       [](ExperimentConfig& c, const std::string& v, int l) { c.run.inner.max_inner = parse_count(v, l); }},
      {"step_guess",
       [](ExperimentConfig& c, const std::string& v, int l) { c.run.inner.step_guess = parse_double(v, l); }},
      {"output_dir", [](ExperimentConfig& c, const std::string& v, int) { c.output_dir = v; }},
      {"wall_clock", [](ExperimentConfig& c, const std::string& v, int l) { c.wall_clock = parse_bool(v, l); }},
  };
  return table;
}

void validate(const ExperimentConfig& c) {
  if (c.n < 1) throw ConfigError("n must be >= 1", 0);
  if (c.problem == ProblemKind::phase_retrieval && c.m < 1) throw ConfigError("m must be >= 1", 0);
  if (c.lambda < 0.0) throw ConfigError("lambda must be nonnegative", 0);
  if (c.noise_scale < 0.0) throw ConfigError("noise_scale must be nonnegative", 0);
  if (!(c.signal_variance > 0.0)) throw ConfigError("signal_variance must be positive", 0);
  if (!(c.d_min > 0.0) || c.d_max < c.d_min) throw ConfigError("need 0 < d_min <= d_max", 0);
  if (c.d.size() != c.c.size()) throw ConfigError("d and c must have the same length", 0);
  for (double di : c.d)
    if (!(di > 0.0)) throw ConfigError("curvatures d must be positive", 0);
  if (!(c.u > c.run.u_min && c.u <= 1.0)) throw ConfigError("u must lie in (u_min, 1]", 0);
  for (double u : c.u_list)
    if (!(u > c.run.u_min && u <= 1.0)) throw ConfigError("every u_list entry must lie in (u_min, 1]", 0);
  try {
    c.run_config(c.u).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line_no);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);
    it->second(config, value, line_no);
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string(), 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_env_overrides(ExperimentConfig& config) {
  if (const char* s = std::getenv("NHOTA_SEED")) config.seed = parse_seed(s, 0);
}

ProblemInstance build_problem(const ExperimentConfig& config) {
  ProblemInstance inst;
  if (config.problem == ProblemKind::phase_retrieval) {
    PhaseRetrievalData data =
        config.data_dir ? load_phase_retrieval(*config.data_dir)
                        : gen_phase_retrieval_data(config.n, config.m, config.seed, config.noise_scale,
                                                   config.lambda, config.signal_variance);
    inst.problem = phase_retrieval_problem(data);
    inst.x0 = data.x0;
    inst.hash = data_hash(data);
    inst.phase = std::move(data);
  } else {
    DiagQuadL1 gen = gen_diag_quad(config.n, config.seed, config.lambda, config.d_min, config.d_max);
    if (!config.d.empty()) {
      gen.data.d = Eigen::Map<const Vector>(config.d.data(), static_cast<Eigen::Index>(config.d.size()));
      gen.data.c = Eigen::Map<const Vector>(config.c.data(), static_cast<Eigen::Index>(config.c.size()));
      gen.problem = diag_quad_problem(gen.data);
      if (gen.x0.size() != gen.data.d.size()) gen.x0 = Vector::Zero(gen.data.d.size());
    }
    inst.problem = gen.problem;
    inst.x0 = gen.x0;
    inst.f_star = gen.problem.known_opt->f;
    inst.diag = gen.data;
    std::uint64_t h = 1469598103934665603ULL;
    for (const Vector* v : {&gen.data.d, &gen.data.c}) {
      const auto* bytes = reinterpret_cast<const unsigned char*>(v->data());
      for (std::size_t i = 0; i < static_cast<std::size_t>(v->size()) * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
      }
    }
    inst.hash = h;
  }
  if (!config.x0.empty()) {
    if (static_cast<int>(config.x0.size()) != inst.problem.dim())
      throw ConfigError("x0 has the wrong dimension", 0);
    inst.x0 = Eigen::Map<const Vector>(config.x0.data(), static_cast<Eigen::Index>(config.x0.size()));
  }
  return inst;
}

std::string format_trace_row(const TraceRow& row, bool wall_clock) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.3f", row.k, row.f, row.R,
                row.M, row.step_norm, row.stationarity, row.inner_iters, row.backtracks,
                wall_clock ? row.wall_millis : 0.0);
  return buf;
}

void write_summary(const std::filesystem::path& file, const std::map<std::string, std::string>& fields) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (const auto& [k, v] : fields) out << k << '=' << v << '\n';
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string u_label(double u) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", u);
  return buf;
}

}  // namespace

RunSummary run_to_directory(const ProblemInstance& instance, const ExperimentConfig& config, double u,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "trace.csv");
  if (!csv) throw std::runtime_error("cannot write " + (dir / "trace.csv").string());
  csv << kTraceHeader << '\n' << std::flush;

  RunSummary summary;
  summary.trace = nhota_run(instance.problem, instance.x0, config.run_config(u), [&](const TraceRow& row) {
    csv << format_trace_row(row, config.wall_clock) << '\n' << std::flush;
  });
  const IterateTrace& tr = summary.trace;

  auto& f = summary.fields;
  f["problem"] = config.problem == ProblemKind::phase_retrieval ? "phase_retrieval" : "diag_quad_l1";
  f["status"] = to_string(tr.status);
  f["iterations"] = std::to_string(tr.rows.empty() ? 0 : tr.rows.back().k);
  f["final_f"] = fmt_double(tr.rows.back().f);
  f["final_stationarity"] = fmt_double(tr.rows.back().stationarity);
  f["stationarity_is_bound"] = tr.rows.back().stationarity_is_bound ? "true" : "false";
  f["M_max"] = fmt_double(tr.M_max);
  f["u"] = u_label(u);
  f["p"] = std::to_string(config.run.p);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(instance.hash));
  f["data_hash"] = hash;
  const auto stat = prefix_min(tr.stationarity_series());
  const int last = static_cast<int>(stat.size()) - 1;
  bool positive = last >= 7;
  for (int k = 3; positive && k <= last; ++k) positive = stat[k] > 0.0;
  if (positive) {
    const RateFit fit = rate_fit(stat, last);
    f["fitted_slope"] = fmt_double(fit.slope);
    f["fitted_r2"] = fmt_double(fit.r2);
  } else {
    f["fitted_slope"] = "nan";
    f["fitted_r2"] = "nan";
  }
  if (instance.f_star) {
    f["f_star"] = fmt_double(*instance.f_star);
    f["final_gap"] = fmt_double(tr.rows.back().f - *instance.f_star);
  }
  if (!tr.message.empty()) f["message"] = tr.message;
  write_summary(dir / "summary.txt", f);
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  const ProblemInstance instance = build_problem(config);
  return run_to_directory(instance, config, config.u, config.output_dir);
}

SweepResult sweep_u(const ExperimentConfig& config) {
  if (config.u_list.empty()) throw ConfigError("u_list must be nonempty", 0);
  const ProblemInstance instance = build_problem(config);
  SweepResult result;
  result.u_values = config.u_list;

  std::vector<std::future<RunSummary>> jobs;
  for (double u : config.u_list) {
    const auto dir = config.output_dir / ("u_" + u_label(u));
    jobs.push_back(std::async(std::launch::async, [&instance, &config, u, dir] {
      return run_to_directory(instance, config, u, dir);
    }));
  }
  for (auto& j : jobs) result.runs.push_back(j.get());

  std::ofstream wide(config.output_dir / "sweep.csv");
  if (!wide) throw std::runtime_error("cannot write sweep.csv");
  wide << 'k';
  for (double u : config.u_list) wide << ",f_u" << u_label(u) << ",stationarity_u" << u_label(u);
  wide << '\n';
  std::size_t rows = 0;
  for (const auto& r : result.runs) rows = std::max(rows, r.trace.rows.size());
  for (std::size_t k = 0; k < rows; ++k) {
    wide << k;
    for (const auto& r : result.runs) {
      if (k < r.trace.rows.size())
        wide << ',' << fmt_double(r.trace.rows[k].f) << ',' << fmt_double(r.trace.rows[k].stationarity);
      else
        wide << ",,";
    }
    wide << '\n';
  }
  return result;
}

}  // namespace nhota
