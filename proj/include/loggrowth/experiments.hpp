#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loggrowth/densities.hpp"
#include "loggrowth/pvcore.hpp"

namespace loggrowth::exp {

inline constexpr const char* kSchemaVersion = "1";

struct ExperimentConfig {
  std::vector<std::string> densities = {"D1", "D2", "D3", "D4"};
  std::optional<std::size_t> seeds;  // default depends on the experiment and scale
  double scale = 0.25;
  std::optional<std::filesystem::path> out_dir;  // no files written when unset
  std::uint64_t seed_base = 20240601;
  std::vector<double> eta_grid;  // exp3 algorithm-2 grid; default 8 points 5e-2 .. 9e-5
  std::vector<double> eps_grid;  // exp1 grid; default 9 points 1e-1 .. 1e-5
  std::vector<std::string> estimators = {"naive", "paired"};  // exp1
  int kde_order = 2;
  double kde_ch = 1.0;
  std::optional<std::size_t> M;       // exp1 override
  std::optional<std::size_t> n_iter;  // exp2 / exp3 Robbins-Monro override

  void validate() const;
};

/// "all" expands to D1..D4; otherwise a comma-separated list.
std::vector<std::string> parse_density_list(const std::string& s);
std::vector<double> parse_grid(const std::string& s);

/// Basin half-width used throughout: 0.14 for D2, otherwise pv::widest_delta.
double basin_delta(const NoiseDensity& d, double Kstar);

/// K*, its local constants and the finite-part Hessian without kink break-points.
struct DensityConstants {
  std::string density;
  pv::LocalConstants c;
  double H_no_kink = 0.0;
};

DensityConstants density_constants(const NoiseDensity& d);

// ---- constants ----
std::vector<DensityConstants> run_constants(const ExperimentConfig& cfg);

// ---- exp1: variance scaling ----
struct Exp1Row {
  std::string density;
  std::string estimator;
  double eps = 0.0;
  std::size_t M = 0;
  std::size_t seeds = 0;
  double mean_var = 0.0;
  double se = 0.0;
};

struct Exp1Fit {
  std::string density;
  std::string estimator;
  double slope = 0.0;
  double var_eps_min = 0.0;      // naive: Var * eps at the smallest eps
  double prediction = 0.0;       // naive: pi rho(b_sing) / (2 |K*|^3)
  double plateau = 0.0;          // paired: Var at the smallest eps
  double plateau_change = 0.0;   // paired: relative change between eps = 1e-3 and the smallest eps
};

struct Exp1Result {
  std::vector<Exp1Row> rows;
  std::vector<Exp1Fit> fits;
  /// naive / paired variance at the smallest eps, per density.
  std::vector<std::pair<std::string, double>> ratio;
};

Exp1Result run_exp1(const ExperimentConfig& cfg);

// ---- exp2: density-known Robbins-Monro ----
struct Exp2Row {
  std::string density;
  std::size_t n = 0;
  double gap_median = 0.0;
  double gap_q25 = 0.0;
  double gap_q75 = 0.0;
};

struct Exp2Fit {
  std::string density;
  double gap_slope = 0.0;      // last decade of n
  double neta_slope = 0.0;     // log N(eta) vs log eta
  double proxy_vs_direct = 0.0;  // max relative gap discrepancy at the final iterate
  std::vector<std::pair<double, std::size_t>> n_eta;
};

struct Exp2Result {
  std::vector<Exp2Row> rows;
  std::vector<Exp2Fit> fits;
};

Exp2Result run_exp2(const ExperimentConfig& cfg);

// ---- exp3: density-unknown comparison on one density ----
struct Exp3Row {
  std::string method;
  double total_samples = 0.0;
  double eta = 0.0;  // NaN unless the method is algorithm 2
  double gap_mean = 0.0;
  double gap_se = 0.0;
};

struct Exp3Result {
  std::string density;
  std::vector<Exp3Row> rows;
  double naive_slope_min = 0.0;   // steepest one-decade slope of the naive trace
  double paired_slope = 0.0;      // last decade
  double alg2_slope = 0.0;        // all grid points
  double plug_slope = 0.0;        // all ladder points
  bool alg2_gap_below_eta = false;
  double alg2_max_gap_over_eta = 0.0;
};

Exp3Result run_exp3(const ExperimentConfig& cfg);

// ---- exp4: quadrature ablation ----
struct Exp4aRow {
  std::string scheme;
  double K = 0.0;
  double b_sing = 0.0;
  double abs_err = 0.0;
};

struct Exp4bRow {
  std::string scheme;
  std::size_t iter = 0;
  double residual = 0.0;
};

struct Exp4Result {
  std::vector<Exp4aRow> sweep;
  std::vector<Exp4bRow> newton;
  double max_err(const std::string& scheme) const;
  double residual(const std::string& scheme, std::size_t iter) const;
};

Exp4Result run_exp4(const ExperimentConfig& cfg);

}  // namespace loggrowth::exp
