#include "pcs/harness.hpp"

#include "pcs/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace pcs {

SignalKind parse_signal_kind(std::string_view s) {
  if (s == "packing") return SignalKind::Packing;
  if (s == "triangular") return SignalKind::Triangular;
  if (s == "delta") return SignalKind::Delta;
  throw InvalidArgument("unknown signal kind '" + std::string(s) + "'");
}

Estimator parse_estimator(std::string_view s) {
  if (s == "spiral") return Estimator::Spiral;
  if (s == "l0") return Estimator::L0;
  if (s == "ds") return Estimator::Downsampling;
  throw InvalidArgument("unknown estimator '" + std::string(s) + "'");
}

SweepAxis parse_axis(std::string_view s) {
  if (s == "T") return SweepAxis::T;
  if (s == "n") return SweepAxis::N;
  if (s == "s") return SweepAxis::S;
  throw InvalidArgument("unknown sweep axis '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "svg") return OutputFormat::Svg;
  throw InvalidArgument("unknown output format '" + std::string(s) + "'");
}

std::string_view to_string(SignalKind k) {
  switch (k) {
    case SignalKind::Packing: return "packing";
    case SignalKind::Triangular: return "triangular";
    case SignalKind::Delta: return "delta";
  }
  return "?";
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Spiral: return "spiral";
    case Estimator::L0: return "l0";
    case Estimator::Downsampling: return "ds";
  }
  return "?";
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::T: return "T";
    case SweepAxis::N: return "n";
    case SweepAxis::S: return "s";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (p < 2) throw InvalidDimension("config: p must be at least 2");
  if (trials < 1) throw InvalidArgument("config: trials must be at least 1");
  if (n.empty() || s.empty() || T.empty()) throw InvalidArgument("config: n, s and T must be nonempty");
  for (int v : n)
    if (v < 1) throw InvalidDimension("config: n must be positive");
  for (int v : s)
    if (v < 0 || v >= p) throw InvalidDimension("config: need 0 <= s < p");
  for (double v : T)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("config: T must be positive and finite");
  for (double v : tau_grid)
    if (!(v >= 0.0)) throw InvalidArgument("config: tau values must be nonnegative");
  if (basis_kind != BasisKind::DCT && !is_power_of_two(static_cast<std::uint64_t>(p)))
    throw InvalidDimension("config: dht and dwt need p a power of two");
  if (kappa < 1 || p % kappa != 0) throw InvalidDimension("config: kappa must divide p");
  for (int v : s)
    if (s_prime > v) throw InvalidArgument("config: s_prime must not exceed s");
  if (signal_kind == SignalKind::Triangular && basis_kind != BasisKind::DCT)
    throw UnsupportedBasis("config: triangular signals are defined for dct");
  if (signal_kind == SignalKind::Delta && basis_kind != BasisKind::DWT)
    throw UnsupportedBasis("config: delta signals are defined for dwt");
  if (estimator == Estimator::Downsampling && basis_kind != BasisKind::DWT)
    throw UnsupportedBasis("config: the downsampling estimator needs dwt");
  if (fixed_tau && tau_grid.empty()) throw InvalidArgument("config: fixed tau needs a nonempty tau_grid");
}

namespace {

using nlohmann::json;

template <class T>
std::vector<T> scalar_or_list(const json& j, const char* key) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(e.get<T>());
    if (out.empty()) throw InvalidArgument(std::string("config: ") + key + " list is empty");
  } else {
    out.push_back(j.get<T>());
  }
  return out;
}

double tau_value(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw InvalidArgument("config: bad tau value '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known = {"p",           "n",      "s",         "basis_kind", "T",
                                              "signal_kind", "estimator", "tau_grid", "trials",    "master_seed",
                                              "kappa",       "s_prime"};
  static const char* required[] = {"p", "n", "s", "basis_kind", "T", "signal_kind", "estimator", "trials", "master_seed"};
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw InvalidArgument("config: unknown field '" + key + "'");
  for (const char* key : required)
    if (!j.contains(key)) throw InvalidArgument(std::string("config: missing field '") + key + "'");

  ExperimentConfig cfg;
  try {
    cfg.p = j.at("p").get<int>();
    cfg.n = scalar_or_list<int>(j.at("n"), "n");
    cfg.s = scalar_or_list<int>(j.at("s"), "s");
    cfg.basis_kind = parse_basis_kind(j.at("basis_kind").get<std::string>());
    cfg.T = scalar_or_list<double>(j.at("T"), "T");
    cfg.signal_kind = parse_signal_kind(j.at("signal_kind").get<std::string>());
    cfg.estimator = parse_estimator(j.at("estimator").get<std::string>());
    cfg.tau_grid.clear();
    if (j.contains("tau_grid"))
      for (const auto& e : j.at("tau_grid")) cfg.tau_grid.push_back(tau_value(e));
    cfg.trials = j.at("trials").get<int>();
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("kappa")) cfg.kappa = j.at("kappa").get<int>();
    if (j.contains("s_prime")) cfg.s_prime = j.at("s_prime").get<int>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["p"] = cfg.p;
  j["n"] = cfg.n.size() == 1 ? json(cfg.n[0]) : json(cfg.n);
  j["s"] = cfg.s.size() == 1 ? json(cfg.s[0]) : json(cfg.s);
  j["basis_kind"] = std::string(to_string(cfg.basis_kind));
  j["T"] = cfg.T.size() == 1 ? json(cfg.T[0]) : json(cfg.T);
  j["signal_kind"] = std::string(to_string(cfg.signal_kind));
  j["estimator"] = std::string(to_string(cfg.estimator));
  json taus = json::array();
  for (double t : cfg.tau_grid) taus.push_back(std::isinf(t) ? json("inf") : json(t));
  j["tau_grid"] = taus;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["kappa"] = cfg.kappa;
  j["s_prime"] = cfg.s_prime;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

namespace {

enum SeedTag : std::uint64_t { kSignal = 1, kMatrix = 2, kNoise = 3 };

[[noreturn]] void rethrow_annotated(int trial_index) {
  const std::string tag = "trial " + std::to_string(trial_index) + ": ";
  try {
    throw;
  } catch (const ComplexityGuard& e) {
    throw ComplexityGuard(tag + "complexity guard", e.required, e.budget);
  } catch (const InvalidDimension& e) {
    throw InvalidDimension(tag + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(tag + e.what());
  } catch (const UnsupportedBasis& e) {
    throw UnsupportedBasis(tag + e.what());
  } catch (const DomainError& e) {
    throw DomainError(tag + e.what());
  } catch (const SolverDivergence& e) {
    throw SolverDivergence(tag + e.what(), e.objective_trace);
  } catch (const IoError& e) {
    throw IoError(tag + e.what());
  } catch (const Error& e) {
    throw Error(tag + e.what());
  }
}

Signal make_truth(const ExperimentConfig& cfg, const Basis& basis, int s, std::uint64_t seed) {
  switch (cfg.signal_kind) {
    case SignalKind::Packing:
      if (cfg.kappa > 1 && cfg.s_prime >= 0)
        return packing_signal_split(basis, s, cfg.s_prime, cfg.p / cfg.kappa, seed);
      return packing_signal(basis, s, seed);
    case SignalKind::Triangular:
      return triangular_signal(basis, s);
    case SignalKind::Delta: {
      CounterStream rng(seed, 0);
      const int position = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.p)));
      return delta_like_dwt_signal(basis, s, position);
    }
  }
  throw InvalidArgument("unknown signal kind");
}

std::vector<int> nonzero_support(const Vector& theta) {
  std::vector<int> out;
  for (Eigen::Index i = 1; i < theta.size(); ++i)
    if (theta[i] != 0.0) out.push_back(static_cast<int>(i));
  return out;
}

TrialDetail simulate(const ExperimentConfig& cfg, int trial_index) {
  const int n = cfg.n.front();
  const int s = cfg.s.front();
  const double T = cfg.T.front();
  const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial_index));
  const Basis basis = make_basis(cfg.basis_kind, cfg.p);

  TrialDetail out;
  out.result.seed = seed;
  out.truth = make_truth(cfg, basis, s, derive_seed(seed, kSignal));
  const Vector& f = out.truth.f;
  out.result.theta_bar_energy = out.truth.theta_bar_energy();

  if (s > 0) {
    const auto lambdas = closed_lambdas(cfg.basis_kind, cfg.p, s);
    out.result.bound_lower = minimax_lower(cfg.p, s, T, lambdas);
  }
  out.result.bound_upper = minimax_upper(cfg.p, s, T, basis.L);

  switch (cfg.estimator) {
    case Estimator::Spiral: {
      const SensingMatrix sm = bernoulli_sensing(n, cfg.p, derive_seed(seed, kMatrix));
      const Vector mu = T * (sm.A * f);
      const Counts y = poisson_sample(mu, derive_seed(seed, kNoise));
      const PoissonProblem problem(y, sm.A, basis, T);
      SpiralResult res;
      if (cfg.fixed_tau) {
        SolverOptions o = cfg.solver;
        o.tau = cfg.tau_grid.front();
        if (std::isinf(o.tau)) o.tau = std::numeric_limits<double>::max();
        res = spiral_solve(problem, basis, o);
      } else {
        auto taus = cfg.tau_grid.empty() ? auto_tau_grid(problem) : cfg.tau_grid;
        res = spiral_oracle(problem, basis, std::move(taus), cfg.solver, f).best;
      }
      out.theta_hat = res.estimate.theta;
      out.f_hat = res.estimate.f;
      out.theta_raw = res.trace.theta_raw;
      out.objective_trace = res.trace.objective;
      out.result.tau_used = res.tau;
      out.result.iterations = res.trace.iterations;
      break;
    }
    case Estimator::L0: {
      const SensingMatrix sm = bernoulli_sensing(n, cfg.p, derive_seed(seed, kMatrix));
      const Vector mu = T * (sm.A * f);
      const Counts y = poisson_sample(mu, derive_seed(seed, kNoise));
      L0Options o;
      o.exec = cfg.exec;
      const L0Result res = l0_exhaustive(y, sm, basis, T, s, o);
      out.theta_hat = res.estimate.theta;
      out.f_hat = res.estimate.f;
      out.theta_raw = res.theta_candidate;
      out.objective_trace = {res.objective};
      out.result.iterations = static_cast<int>(res.candidates);
      out.result.support_recovered = nonzero_support(res.theta_candidate) == nonzero_support(out.truth.theta);
      break;
    }
    case Estimator::Downsampling: {
      const Matrix A_ds = downsampling_matrix(cfg.p, cfg.kappa);
      const Vector mu = T * (A_ds * f);
      const Counts y = poisson_sample(mu, derive_seed(seed, kNoise));
      out.theta_hat = downsampling_estimate(y, basis, T, cfg.kappa);
      out.f_hat = synthesize(basis, out.theta_hat);
      out.theta_raw = out.theta_hat;
      const int sp = cfg.s_prime >= 0 ? cfg.s_prime : s;
      if (s > 0) out.result.bound_upper = ds_upper(cfg.p, s, sp, T, cfg.kappa, lambda_closed(cfg.basis_kind, cfg.p, s));
      break;
    }
  }
  out.result.mse = (out.f_hat - f).squaredNorm();
  return out;
}

}  // namespace

TrialDetail run_trial_detailed(const ExperimentConfig& cfg, int trial_index) {
  cfg.validate();
  try {
    return simulate(cfg, trial_index);
  } catch (const Error&) {
    rethrow_annotated(trial_index);
  }
}

TrialResult run_trial(const ExperimentConfig& cfg, int trial_index) {
  return run_trial_detailed(cfg, trial_index).result;
}

namespace {

// Runs trials 0..cfg.trials-1; inner kernels stay serial while trials spread
// across threads. Results land in index order.
std::vector<TrialResult> run_trials(const ExperimentConfig& cfg) {
  ExperimentConfig inner = cfg;
  inner.exec = Exec::Serial;
  const int count = cfg.trials;
  std::vector<TrialResult> results(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  auto body = [&](int i) {
    try {
      results[static_cast<std::size_t>(i)] = run_trial(inner, i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (cfg.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (int i = 0; i < count; ++i) body(i);
  } else {
    for (int i = 0; i < count; ++i) body(i);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

SweepRecord aggregate(const ExperimentConfig& cfg, std::string axis_name, double axis_value,
                      const std::vector<TrialResult>& trials) {
  SweepRecord r;
  r.axis_name = std::move(axis_name);
  r.axis_value = axis_value;
  const double count = static_cast<double>(trials.size());
  double sum = 0.0, energy = 0.0, tau = 0.0, iters = 0.0, recovered = 0.0;
  for (const auto& t : trials) {
    sum += t.mse;
    energy += t.theta_bar_energy;
    tau += t.tau_used;
    iters += t.iterations;
    recovered += t.support_recovered ? 1.0 : 0.0;
  }
  r.mean_mse = sum / count;
  double ss = 0.0;
  for (const auto& t : trials) ss += (t.mse - r.mean_mse) * (t.mse - r.mean_mse);
  r.stderr_mse = trials.size() > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
  r.bound_lower = trials.front().bound_lower;
  r.bound_upper = trials.front().bound_upper;

  const int s = cfg.s.front();
  const double T = cfg.T.front();
  auto& x = r.extra;
  x["series"] = std::string(to_string(cfg.estimator));
  x["basis_kind"] = std::string(to_string(cfg.basis_kind));
  x["trials"] = trials.size();
  x["p"] = cfg.p;
  x["n"] = cfg.n.front();
  x["s"] = s;
  x["T"] = T;
  x["mean_theta_bar_energy"] = energy / count;
  x["mean_tau"] = tau / count;
  x["mean_iterations"] = iters / count;
  x["high_intensity"] = T >= 10.0 * s * std::log(static_cast<double>(cfg.p));
  if (r.bound_lower > 0.0) x["ratio_to_lower"] = r.mean_mse / r.bound_lower;
  if (r.bound_upper > 0.0) x["ratio_to_upper"] = r.mean_mse / r.bound_upper;
  if (cfg.estimator == Estimator::L0) x["support_recovery_rate"] = recovered / count;
  return r;
}

ExperimentConfig at_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig c = cfg;
  switch (axis) {
    case SweepAxis::T: c.T = {value}; break;
    case SweepAxis::N: c.n = {static_cast<int>(std::llround(value))}; break;
    case SweepAxis::S: c.s = {static_cast<int>(std::llround(value))}; break;
  }
  c.n.resize(1);
  c.s.resize(1);
  c.T.resize(1);
  return c;
}

}  // namespace

std::vector<double> axis_values(const ExperimentConfig& cfg, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::T: return cfg.T;
    case SweepAxis::N: return {cfg.n.begin(), cfg.n.end()};
    case SweepAxis::S: return {cfg.s.begin(), cfg.s.end()};
  }
  return {};
}

std::vector<SweepRecord> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("sweep: no axis values");
  if (!std::is_sorted(values.begin(), values.end())) throw InvalidArgument("sweep: axis values must be ascending");
  std::vector<SweepRecord> out;
  out.reserve(values.size());
  for (double v : values) {
    const ExperimentConfig c = at_axis_value(cfg, axis, v);
    c.validate();
    out.push_back(aggregate(c, std::string(to_string(axis)), v, run_trials(c)));
  }
  return out;
}

std::vector<SweepRecord> compare_ds_cs(const ExperimentConfig& cfg, const std::vector<double>& T_values) {
  if (cfg.basis_kind != BasisKind::DWT) throw UnsupportedBasis("compare_ds_cs: needs dwt");
  if (T_values.empty()) throw InvalidArgument("compare_ds_cs: no T values");
  if (!std::is_sorted(T_values.begin(), T_values.end()))
    throw InvalidArgument("compare_ds_cs: T values must be ascending");
  ExperimentConfig base = cfg;
  if (base.s_prime < 0) base.s_prime = base.s.front();
  base.signal_kind = SignalKind::Packing;
  if (base.kappa < 2) throw InvalidArgument("compare_ds_cs: kappa must be at least 2");

  const int s = base.s.front();
  const double lambda = lambda_closed(BasisKind::DWT, static_cast<std::uint64_t>(base.p), s);
  std::vector<SweepRecord> out;
  for (double T : T_values) {
    ExperimentConfig cs = at_axis_value(base, SweepAxis::T, T);
    cs.estimator = Estimator::Spiral;
    ExperimentConfig ds = cs;
    ds.estimator = Estimator::Downsampling;
    cs.validate();
    ds.validate();
    const auto cs_trials = run_trials(cs);
    const auto ds_trials = run_trials(ds);

    SweepRecord rc = aggregate(cs, "T", T, cs_trials);
    SweepRecord rd = aggregate(ds, "T", T, ds_trials);
    const double dsu = ds_upper(base.p, s, base.s_prime, T, base.kappa, lambda);
    for (SweepRecord* r : {&rc, &rd}) {
      r->extra["kappa"] = base.kappa;
      r->extra["s_prime"] = base.s_prime;
      r->extra["ds_upper"] = dsu;
      r->extra["minimax_lower"] = cs_trials.front().bound_lower;
      r->extra["minimax_upper"] = cs_trials.front().bound_upper;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < cs_trials.size(); ++i) diff += ds_trials[i].mse - cs_trials[i].mse;
    rd.extra["mean_paired_difference"] = diff / static_cast<double>(cs_trials.size());
    out.push_back(std::move(rc));
    out.push_back(std::move(rd));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_csv(const std::vector<SweepRecord>& records) {
  std::string out = "axis_name,axis_value,mean_mse,stderr_mse,bound_lower,bound_upper,extra\n";
  for (const auto& r : records) {
    out += r.axis_name + ',' + fmt17(r.axis_value) + ',' + fmt17(r.mean_mse) + ',' + fmt17(r.stderr_mse) + ',' +
           fmt17(r.bound_lower) + ',' + fmt17(r.bound_upper) + ',' + csv_quote(r.extra.dump()) + '\n';
  }
  return out;
}

std::vector<SweepRecord> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw InvalidArgument("csv: unterminated quoted field");
  if (any || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("csv: missing header");
  const std::vector<std::string> header = {"axis_name",   "axis_value",  "mean_mse", "stderr_mse",
                                           "bound_lower", "bound_upper", "extra"};
  if (rows.front() != header) throw InvalidArgument("csv: unexpected header");

  std::vector<SweepRecord> out;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.size() != header.size()) throw InvalidArgument("csv: row " + std::to_string(k) + " has wrong width");
    SweepRecord rec;
    rec.axis_name = r[0];
    try {
      rec.axis_value = std::stod(r[1]);
      rec.mean_mse = std::stod(r[2]);
      rec.stderr_mse = std::stod(r[3]);
      rec.bound_lower = std::stod(r[4]);
      rec.bound_upper = std::stod(r[5]);
      rec.extra = nlohmann::json::parse(r[6]);
    } catch (const std::exception& e) {
      throw InvalidArgument("csv: row " + std::to_string(k) + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

nlohmann::json to_json(const std::vector<SweepRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"axis_name", r.axis_name},
                   {"axis_value", r.axis_value},
                   {"mean_mse", r.mean_mse},
                   {"stderr_mse", r.stderr_mse},
                   {"bound_lower", r.bound_lower},
                   {"bound_upper", r.bound_upper},
                   {"extra", r.extra}});
  }
  return arr;
}

std::string to_svg(const std::vector<SweepRecord>& records) {
  constexpr double W = 720, H = 480, ml = 80, mr = 170, mt = 30, mb = 60;
  struct Series {
    std::vector<std::pair<double, double>> mse, lower, upper;
  };
  std::map<std::string, Series> series;
  double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
  auto add = [&](std::vector<std::pair<double, double>>& v, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) return;
    const double lx = std::log10(x), ly = std::log10(y);
    v.emplace_back(lx, ly);
    xmin = std::min(xmin, lx), xmax = std::max(xmax, lx);
    ymin = std::min(ymin, ly), ymax = std::max(ymax, ly);
  };
  for (const auto& r : records) {
    std::string name = "mse";
    if (r.extra.is_object() && r.extra.contains("series") && r.extra["series"].is_string())
      name = r.extra["series"].get<std::string>();
    auto& s = series[name];
    add(s.mse, r.axis_value, r.mean_mse);
    add(s.lower, r.axis_value, r.bound_lower);
    add(s.upper, r.axis_value, r.bound_upper);
  }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin), xmax = std::ceil(xmax);
  ymin = std::floor(ymin), ymax = std::ceil(ymax);
  if (xmax == xmin) xmax += 1;
  if (ymax == ymin) ymax += 1;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return mt + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream o;
  char buf[256];
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n", ml, mt, pw, ph);
  o << buf;
  const int xstep = std::max(1, static_cast<int>((xmax - xmin) / 10));
  for (int e = static_cast<int>(xmin); e <= static_cast<int>(xmax); e += xstep) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">1e%d</text>\n",
                  px(e), mt, px(e), mt + ph, px(e), mt + ph + 16, e);
    o << buf;
  }
  const int ystep = std::max(1, static_cast<int>((ymax - ymin) / 10));
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += ystep) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">1e%d</text>\n",
                  ml, py(e), ml + pw, py(e), ml - 6, py(e) + 4, e);
    o << buf;
  }
  const std::string axis = records.empty() ? "x" : records.front().axis_name;
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%s</text>\n", ml + pw / 2, H - 18,
                axis.c_str());
  o << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"18\" y=\"%.2f\" text-anchor=\"middle\" transform=\"rotate(-90 18 %.2f)\">MSE</text>\n",
                mt + ph / 2, mt + ph / 2);
  o << buf;

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  int idx = 0;
  double ly = mt + 10;
  for (const auto& [name, s] : series) {
    const char* color = colors[idx++ % 6];
    auto line = [&](const std::vector<std::pair<double, double>>& pts, const char* dash, const std::string& label) {
      if (pts.empty()) return;
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
      if (*dash) o << " stroke-dasharray=\"" << dash << "\"";
      o << " points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(pts[i].first), py(pts[i].second));
        o << buf;
      }
      o << "\"/>\n";
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"1.5\"%s%s%s/>"
                    "<text x=\"%.2f\" y=\"%.2f\">%s</text>\n",
                    W - mr + 10, ly, W - mr + 40, ly, color, *dash ? " stroke-dasharray=\"" : "", dash,
                    *dash ? "\"" : "", W - mr + 46, ly + 4, label.c_str());
      o << buf;
      ly += 18;
    };
    line(s.mse, "", name + " mean MSE");
    line(s.lower, "6,4", name + " lower");
    line(s.upper, "2,3", name + " upper");
    for (const auto& [x, y] : s.mse) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n", px(x), py(y), color);
      o << buf;
    }
  }
  o << "</svg>\n";
  return o.str();
}

void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::filesystem::path& path) {
  if (records.empty()) throw InvalidArgument("emit: no records");
  std::string body;
  switch (format) {
    case OutputFormat::Csv: body = to_csv(records); break;
    case OutputFormat::Json: body = to_json(records).dump(2) + "\n"; break;
    case OutputFormat::Svg: body = to_svg(records); break;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit: cannot write '" + path.string() + "'");
  out << body;
  out.flush();
  if (!out) throw IoError("emit: write failed for '" + path.string() + "'");
}

}  // namespace pcs
