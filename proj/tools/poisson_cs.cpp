// Command-line front end. Every subcommand prints one JSON document; errors go
// to stderr as {"error": ..., "type": ...} with exit status 1.

#include "pcs/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

using nlohmann::json;

namespace {

json vec_json(const pcs::Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// Infinity is not representable in JSON.
json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

pcs::OutputFormat format_from_path(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".json") return pcs::OutputFormat::Json;
  if (ext == ".svg") return pcs::OutputFormat::Svg;
  return pcs::OutputFormat::Csv;
}

std::string_view error_type(const pcs::Error& e) {
  if (dynamic_cast<const pcs::ComplexityGuard*>(&e)) return "ComplexityGuard";
  if (dynamic_cast<const pcs::InvalidDimension*>(&e)) return "InvalidDimension";
  if (dynamic_cast<const pcs::InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const pcs::UnsupportedBasis*>(&e)) return "UnsupportedBasis";
  if (dynamic_cast<const pcs::DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const pcs::SolverDivergence*>(&e)) return "SolverDivergence";
  if (dynamic_cast<const pcs::IoError*>(&e)) return "IoError";
  return "Error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-limited compressed sensing: bases, sensing matrices, estimators, bounds, sweeps"};
  app.require_subcommand(1);

  // lambda
  auto* lam = app.add_subcommand("lambda", "s-sparse localization of a basis");
  std::string lam_basis;
  int lam_p = 0, lam_k = 0;
  bool lam_brute = false;
  double lam_budget = 1e7;
  lam->add_option("--basis", lam_basis, "dct, dht or dwt")->required();
  lam->add_option("--p", lam_p)->required();
  lam->add_option("--k", lam_k)->required();
  lam->add_flag("--brute", lam_brute, "also enumerate exhaustively");
  lam->add_option("--budget", lam_budget, "max sign vectors for --brute");

  // matrix
  auto* mat = app.add_subcommand("matrix", "flux-preserving Bernoulli sensing matrix");
  int mat_n = 0, mat_p = 0, mat_s = 1;
  std::uint64_t mat_seed = 0;
  bool mat_validate = false, mat_rip = false, mat_sample = false, mat_print = false;
  std::string mat_basis = "dct", mat_dump;
  double mat_budget = 1e6;
  mat->add_option("--n", mat_n)->required();
  mat->add_option("--p", mat_p)->required();
  mat->add_option("--seed", mat_seed)->required();
  mat->add_flag("--validate", mat_validate, "check nonnegativity and column sums");
  mat->add_flag("--rip", mat_rip, "estimate the restricted isometry constant of A_tilde D");
  mat->add_option("--basis", mat_basis);
  mat->add_option("--s", mat_s);
  mat->add_option("--budget", mat_budget, "max supports for --rip");
  mat->add_flag("--sample", mat_sample, "sample supports when over budget");
  mat->add_option("--dump", mat_dump, "write A in binary (int64 n, int64 p, float64 row-major)");
  mat->add_flag("--print", mat_print, "include A in the JSON output");

  // signal
  auto* sig = app.add_subcommand("signal", "draw a member of the signal class");
  std::string sig_basis, sig_kind;
  int sig_p = 0, sig_s = 0;
  std::uint64_t sig_seed = 0;
  sig->add_option("--basis", sig_basis)->required();
  sig->add_option("--p", sig_p)->required();
  sig->add_option("--s", sig_s)->required();
  sig->add_option("--kind", sig_kind, "packing, triangular or delta")->required();
  sig->add_option("--seed", sig_seed);

  // estimate
  auto* est = app.add_subcommand("estimate", "simulate one trial and reconstruct");
  std::string est_method, est_config;
  int est_trial = 0;
  bool est_fixed = false;
  est->add_option("--method", est_method, "spiral, l0 or ds")->required();
  est->add_option("--config", est_config)->required();
  est->add_option("--trial", est_trial, "trial index");
  est->add_flag("--fixed-tau", est_fixed, "use the first tau_grid value instead of oracle selection");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "minimax bounds");
  std::string bnd_basis;
  int bnd_p = 0, bnd_s = 0, bnd_kappa = 1, bnd_sprime = -1;
  double bnd_T = 0, bnd_delta = 0, bnd_CL = 1, bnd_CU = 1;
  bool bnd_table1 = false, bnd_ds = false, bnd_logT = false;
  bnd->add_option("--basis", bnd_basis)->required();
  bnd->add_option("--p", bnd_p)->required();
  bnd->add_option("--s", bnd_s)->required();
  bnd->add_option("--T", bnd_T)->required();
  bnd->add_flag("--table1", bnd_table1, "also report the per-basis table");
  bnd->add_flag("--ds", bnd_ds, "also report the downsampling bound");
  bnd->add_option("--kappa", bnd_kappa);
  bnd->add_option("--sprime", bnd_sprime);
  bnd->add_option("--delta", bnd_delta);
  bnd->add_option("--C_L", bnd_CL);
  bnd->add_option("--C_U", bnd_CU);
  bnd->add_flag("--logT", bnd_logT, "include the log(T+1) term in the upper bound");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Monte Carlo sweep over one axis");
  std::string swp_config, swp_axis, swp_out, swp_format = "csv";
  bool swp_fixed = false;
  swp->add_option("--config", swp_config)->required();
  swp->add_option("--axis", swp_axis, "T, n or s")->required();
  swp->add_option("--out", swp_out)->required();
  swp->add_option("--format", swp_format, "csv, json or svg");
  swp->add_flag("--fixed-tau", swp_fixed, "use the first tau_grid value instead of oracle selection");

  // compare-ds
  auto* cmp = app.add_subcommand("compare-ds", "paired downsampling vs compressed sensing over T");
  std::string cmp_config, cmp_out, cmp_format;
  bool cmp_fixed = false;
  cmp->add_option("--config", cmp_config)->required();
  cmp->add_option("--out", cmp_out)->required();
  cmp->add_option("--format", cmp_format, "csv, json or svg (default: from the extension)");
  cmp->add_flag("--fixed-tau", cmp_fixed, "use the first tau_grid value instead of oracle selection");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*lam) {
      const auto kind = pcs::parse_basis_kind(lam_basis);
      json j{{"basis", lam_basis},
             {"p", lam_p},
             {"k", lam_k},
             {"closed", pcs::lambda_closed(kind, lam_p, lam_k, pcs::LambdaForm::Exact)},
             {"table1", pcs::lambda_closed(kind, lam_p, lam_k, pcs::LambdaForm::Table1)}};
      if (kind == pcs::BasisKind::DWT)
        j["truncated_scales"] = pcs::lambda_closed(kind, lam_p, lam_k, pcs::LambdaForm::TruncatedScales);
      if (lam_brute) {
        pcs::LambdaBruteOptions o;
        o.budget = lam_budget;
        j["brute"] = pcs::lambda_brute(pcs::make_basis(kind, lam_p), lam_k, o);
      }
      print(j);
    } else if (*mat) {
      const auto sm = pcs::bernoulli_sensing(mat_n, mat_p, mat_seed);
      json j{{"n", sm.n}, {"p", sm.p}, {"seed", sm.seed}, {"shift", sm.shift}, {"rescale", sm.rescale},
             {"min_entry", sm.A.minCoeff()}, {"max_entry", sm.A.maxCoeff()}};
      if (mat_validate) {
        const auto rep = pcs::validate_physical(sm.A);
        j["validate"] = {{"pass", rep.pass()},
                         {"negative_entries", rep.negative.size()},
                         {"column_sum_violations", rep.column_sums.size()},
                         {"max_column_sum", sm.A.colwise().sum().maxCoeff()}};
      }
      if (mat_rip) {
        pcs::RipOptions o;
        o.budget = mat_budget;
        o.sample = mat_sample;
        o.seed = mat_seed;
        const auto r = pcs::estimate_rip(sm, pcs::make_basis(pcs::parse_basis_kind(mat_basis), mat_p), mat_s, o);
        j["rip"] = {{"basis", mat_basis}, {"s", r.s}, {"delta_hat", r.delta_hat},
                    {"supports_checked", r.supports_checked}, {"sampled", r.sampled}};
      }
      if (!mat_dump.empty()) {
        pcs::write_matrix_binary(mat_dump, sm.A);
        j["dump"] = mat_dump;
      }
      if (mat_print) {
        json rows = json::array();
        for (int i = 0; i < sm.n; ++i) rows.push_back(vec_json(sm.A.row(i).transpose()));
        j["A"] = rows;
      }
      print(j);
    } else if (*sig) {
      const auto basis = pcs::make_basis(pcs::parse_basis_kind(sig_basis), sig_p);
      pcs::Signal s;
      switch (pcs::parse_signal_kind(sig_kind)) {
        case pcs::SignalKind::Packing: s = pcs::packing_signal(basis, sig_s, sig_seed); break;
        case pcs::SignalKind::Triangular: s = pcs::triangular_signal(basis, sig_s); break;
        case pcs::SignalKind::Delta: {
          pcs::CounterStream rng(sig_seed, 0);
          s = pcs::delta_like_dwt_signal(basis, sig_s, 1 + static_cast<int>(rng.below(sig_p)));
          break;
        }
      }
      print({{"basis", sig_basis}, {"p", sig_p}, {"s", sig_s}, {"kind", sig_kind}, {"seed", sig_seed},
             {"theta", vec_json(s.theta)}, {"f", vec_json(s.f)},
             {"theta_bar_energy", s.theta_bar_energy()}, {"member", s.membership.pass()}});
    } else if (*est) {
      auto cfg = pcs::load_config(est_config);
      cfg.estimator = pcs::parse_estimator(est_method);
      cfg.fixed_tau = est_fixed;
      cfg.n.resize(1);
      cfg.s.resize(1);
      cfg.T.resize(1);
      const auto d = pcs::run_trial_detailed(cfg, est_trial);
      json trace = json::array();
      for (double v : d.objective_trace) trace.push_back(num(v));
      print({{"method", est_method}, {"trial", est_trial}, {"seed", d.result.seed},
             {"theta_hat", vec_json(d.theta_hat)}, {"f_hat", vec_json(d.f_hat)},
             {"theta_true", vec_json(d.truth.theta)}, {"objective_trace", trace},
             {"mse", d.result.mse}, {"theta_bar_energy", d.result.theta_bar_energy},
             {"tau_used", num(d.result.tau_used)}, {"iterations", d.result.iterations},
             {"bound_lower", d.result.bound_lower}, {"bound_upper", d.result.bound_upper}});
    } else if (*bnd) {
      const auto kind = pcs::parse_basis_kind(bnd_basis);
      pcs::BoundConfig bc;
      bc.C_L = bnd_CL;
      bc.C_U = bnd_CU;
      bc.delta = bnd_delta;
      bc.include_logT_term = bnd_logT;
      const auto lambdas = pcs::closed_lambdas(kind, bnd_p, bnd_s);
      const auto basis = pcs::make_basis(kind, bnd_p);
      const auto floor = pcs::haar_low_intensity_floor(bnd_p, bnd_s, bnd_T, bc);
      json j{{"basis", bnd_basis},
             {"p", bnd_p},
             {"s", bnd_s},
             {"T", bnd_T},
             {"lower", pcs::minimax_lower(bnd_p, bnd_s, bnd_T, lambdas, bc)},
             {"upper", pcs::minimax_upper(bnd_p, bnd_s, bnd_T, basis.L, bc)},
             {"lower_hypotheses_hold", pcs::minimax_lower_hypotheses(bnd_p, bnd_s)},
             {"lambdas", lambdas}};
      if (kind == pcs::BasisKind::DWT) j["low_intensity_floor"] = {{"applies", floor.applies}, {"floor", floor.floor}};
      if (bnd_table1) {
        const auto t = pcs::table1_bounds(kind, bnd_p, bnd_s, bnd_T);
        j["table1"] = {{"lower", t.lower}, {"upper", t.upper}};
      }
      if (bnd_ds) {
        const int sp = bnd_sprime >= 0 ? bnd_sprime : bnd_s;
        j["ds_upper"] = pcs::ds_upper(bnd_p, bnd_s, sp, bnd_T, bnd_kappa, lambdas.back());
        j["kappa"] = bnd_kappa;
        j["s_prime"] = sp;
      }
      print(j);
    } else if (*swp) {
      auto cfg = pcs::load_config(swp_config);
      cfg.fixed_tau = swp_fixed;
      cfg.validate();
      const auto axis = pcs::parse_axis(swp_axis);
      const auto records = pcs::sweep(cfg, axis, pcs::axis_values(cfg, axis));
      pcs::emit(records, pcs::parse_format(swp_format), swp_out);
      print({{"out", swp_out}, {"records", records.size()}});
    } else if (*cmp) {
      auto cfg = pcs::load_config(cmp_config);
      cfg.fixed_tau = cmp_fixed;
      cfg.validate();
      const auto records = pcs::compare_ds_cs(cfg, cfg.T);
      const auto fmt = cmp_format.empty() ? format_from_path(cmp_out) : pcs::parse_format(cmp_format);
      pcs::emit(records, fmt, cmp_out);
      print({{"out", cmp_out}, {"records", records.size()}});
    }
  } catch (const pcs::Error& e) {
    std::cerr << json{{"error", e.what()}, {"type", error_type(e)}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"type", "std::exception"}}.dump() << "\n";
    return 1;
  }
  return 0;
}
