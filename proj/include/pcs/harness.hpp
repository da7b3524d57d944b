#pragma once

#include "pcs/bounds.hpp"
#include "pcs/estimators.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace pcs {

enum class SignalKind { Packing, Triangular, Delta };
enum class Estimator { Spiral, L0, Downsampling };
enum class SweepAxis { T, N, S };
enum class OutputFormat { Csv, Json, Svg };

SignalKind parse_signal_kind(std::string_view s);
Estimator parse_estimator(std::string_view s);
SweepAxis parse_axis(std::string_view s);
OutputFormat parse_format(std::string_view s);
std::string_view to_string(SignalKind k);
std::string_view to_string(Estimator e);
std::string_view to_string(SweepAxis a);

struct ExperimentConfig {
  int p = 128;
  std::vector<int> n{64};  // a list only when sweeping n
  std::vector<int> s{5};   // a list only when sweeping s
  BasisKind basis_kind = BasisKind::DCT;
  std::vector<double> T{1e6};
  SignalKind signal_kind = SignalKind::Packing;
  Estimator estimator = Estimator::Spiral;
  std::vector<double> tau_grid;  // empty: automatic path from tau_max down 1e-4
  int trials = 100;
  std::uint64_t master_seed = 0;
  int kappa = 1;
  int s_prime = -1;  // -1: all s nonzeros coarse

  // Not part of the config file.
  bool fixed_tau = false;  // use tau_grid[0] alone instead of oracle selection
  SolverOptions solver{};
  Exec exec = Exec::Parallel;

  void validate() const;
};

/// Parse a config object; keys must be exactly the snake_case field names.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

struct TrialResult {
  std::uint64_t seed = 0;
  double mse = 0.0;
  double theta_bar_energy = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  double tau_used = 0.0;
  int iterations = 0;
  bool support_recovered = false;  // l0 only
};

struct TrialDetail {
  TrialResult result;
  Signal truth;
  Vector theta_hat;
  Vector f_hat;
  Vector theta_raw;  // spiral: iterate before the nonnegativity step
  std::vector<double> objective_trace;
};

/// One simulated acquisition and reconstruction; pure in (cfg, trial_index).
TrialDetail run_trial_detailed(const ExperimentConfig& cfg, int trial_index);
TrialResult run_trial(const ExperimentConfig& cfg, int trial_index);

struct SweepRecord {
  std::string axis_name;
  double axis_value = 0.0;
  double mean_mse = 0.0;
  double stderr_mse = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  nlohmann::json extra = nlohmann::json::object();
};

/// cfg.trials trials per value; the axis value overrides T, n or s.
std::vector<SweepRecord> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values);

/// Values of the swept field as listed in the config.
std::vector<double> axis_values(const ExperimentConfig& cfg, SweepAxis axis);

/// Paired CS (spiral) and downsampling arms on shared signals and seeds.
/// Records alternate cs, ds per T value; extra.series names the arm.
std::vector<SweepRecord> compare_ds_cs(const ExperimentConfig& cfg, const std::vector<double>& T_values);

void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::filesystem::path& path);
std::string to_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> parse_csv(const std::string& text);
nlohmann::json to_json(const std::vector<SweepRecord>& records);
std::string to_svg(const std::vector<SweepRecord>& records);

}  // namespace pcs
