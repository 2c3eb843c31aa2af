#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "loggrowth/densities.hpp"
#include "loggrowth/estimators.hpp"
#include "loggrowth/interval.hpp"
#include "loggrowth/kde.hpp"
#include "loggrowth/pvcore.hpp"

namespace loggrowth::opt {

/// Clamp onto the basin.
double project(double K, Interval basin);

enum class Mode { alg1, alg2, robbins_monro };

struct Alg2Params {
  int s = 2;
  double c_R = 0.6;
  double c_1 = 0.5;
  double c_h = 1.0;
  double C_sigma = 1.0;
};

struct PgConfig {
  double eta = 1e-2;
  double K0 = 0.0;
  pv::LocalConstants consts;  // carries the basin, K*, mu0, L0, tau, cbar_b
  Mode mode = Mode::alg1;
  std::optional<Alg2Params> alg2;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> kde_seed;  // defaults to a branch of seed

  // Overrides for the derived batch size and iteration count.
  std::optional<std::size_t> batch_override;
  std::optional<std::size_t> n_star_override;

  // Robbins-Monro
  double rm_eps = 1e-5;
  est::Kind rm_estimator = est::Kind::paired_oracle;

  // Batch-variance probe used to size Algorithm 1's mini-batches.
  std::size_t sigma_probe_M = 20000;
  std::size_t sigma_probe_seeds = 2;
};

struct Iterate {
  std::size_t n = 0;
  double K = 0.0;
  double g = 0.0;  // gradient estimate used to leave K (0 for the last iterate)
};

struct PgTrace {
  std::vector<Iterate> iterates;  // iterates[0] is K^(0)
  double tail_average = 0.0;
  double final_K = 0.0;           // the reported estimate
  std::size_t kde_samples = 0;
  std::size_t iteration_samples = 0;
  double final_gap_estimate = 0.0;

  // Settings derived at configuration time.
  double eps = 0.0;
  double radius = 0.0;
  std::size_t batch = 0;
  std::size_t n_star = 0;
  std::size_t n1 = 0;
  double sigma2 = 0.0;
  std::shared_ptr<const kde::KdeModel> kde;

  std::size_t samples_used() const { return kde_samples + iteration_samples; }
};

/// (H/2)(K - K*)^2 with H the finite-part Hessian at K*.
double gap_proxy(const pv::LocalConstants& c, double K);

/// Mean of K_k for k in (floor(n/2), n], using iterates[k].K.
double tail_average(const std::vector<Iterate>& it, std::size_t n);

/// Tail averages at several n from one prefix-sum pass.
std::vector<double> tail_average_curve(const std::vector<Iterate>& it,
                                       const std::vector<std::size_t>& ns);

PgTrace pg_density_known(const NoiseDensity& d, const PgConfig& cfg);
PgTrace pg_robbins_monro(const NoiseDensity& d, std::size_t n_iter, const PgConfig& cfg);
PgTrace pg_density_unknown(const NoiseDensity& d, const PgConfig& cfg);

struct PhaseResult {
  double K = 0.0;
  std::size_t samples = 0;
  std::size_t iterations = 0;
  std::size_t batch = 0;
  std::size_t t_max = 0;
  double mu1 = 0.0;
  double L1 = 0.0;
  double sigma1_sq = 0.0;
};

/// SGD on J_1 (eps = 1) from K0 until the iterate enters target_basin.
PhaseResult preliminary_phase(const NoiseDensity& d, double K0, Interval K_set,
                              Interval target_basin, std::uint64_t seed);

/// Exact Var[psi(B; K, eps)] by quadrature.
double exact_psi_variance(const DensitySurface& d, double K, double eps);

struct NewtonResult {
  double K = 0.0;
  std::vector<double> iterates;   // K_0, K_1, ...
  std::vector<double> residuals;  // |PV gradient| (parity-shell) at each iterate
  bool converged = false;
};

/// Newton on the principal-value first-order condition with the finite-part
/// Hessian as slope, projected onto the basin.
NewtonResult plug_and_solve(const DensitySurface& d, double K_warm, Interval basin, double mu0,
                            int max_iter = 20);

/// Newton driven by gradients from an integrator with no pole information and
/// a finite-difference slope of those gradients. Residuals are still measured
/// with the parity-shell gradient.
NewtonResult naive_newton(const DensitySurface& d, double K_warm, Interval basin, int max_iter = 20);

}  // namespace loggrowth::opt
