#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "loggrowth/densities.hpp"
#include "loggrowth/kde.hpp"

namespace loggrowth::est {

inline constexpr double kKdeFloor = 1e-12;

/// psi(B; K, eps) = B v / (v^2 + eps^2), v = 1 + BK.
double psi_naive(double B, double K, double eps);

/// Pair average of psi at B and its reflection 2 b_sing - B, weighted by w,
/// in closed form: K s [h(B) - h(Bbar)] / ((K^2 s^2 + eps^2)(w(B) + w(Bbar)))
/// with h = b w and s = B - b_sing. Falls back to psi_naive when the pole is
/// outside the support of w or |s| > radius.
double psi_pair(double B, double K, double eps, const DensitySurface& w, double radius,
                bool check_floor = false);

/// Oracle pairing with the maximal radius (distance from the pole to the nearer edge).
double psi_paired(double B, double K, double eps, const NoiseDensity& d);

/// Plug-in pairing with estimated weights (normally a KDE) and radius R.
/// Throws DegenerateKdeError when the pair density falls below kKdeFloor.
double psi_plugin(double B, double K, double eps, const DensitySurface& m, double R);

/// Pairing weight w(b) = rho(b) / (rho(b) + rho(2 b_sing - b)).
double pair_weight(const DensitySurface& w, double b, double K);

enum class Kind { naive, paired_oracle, paired_plugin };

Kind parse_kind(const std::string& s);
std::string to_string(Kind k);

struct EstimatorSpec {
  Kind kind;
  double eps;
  std::optional<double> radius;  // plug-in only
  NoiseDensity density;          // sampling law; also the oracle weights
  std::shared_ptr<const kde::KdeModel> kde;

  static EstimatorSpec naive(const NoiseDensity& d, double eps);
  static EstimatorSpec paired(const NoiseDensity& d, double eps);
  static EstimatorSpec plugin(const NoiseDensity& d, double eps,
                              std::shared_ptr<const kde::KdeModel> m, double R);

  double evaluate(double B, double K) const;
};

/// Mini-batch mean over N fresh draws from spec.density.
double mc_batch_mean(const EstimatorSpec& spec, double K, std::size_t N, std::uint64_t seed);

struct MeanWithSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Batch mean together with its standard error from the same draws.
MeanWithSe mc_mean_se(const EstimatorSpec& spec, double K, std::size_t N, std::uint64_t seed);

struct VarianceEstimate {
  double mean_var = 0.0;
  double se = 0.0;
};

/// Per-seed sample variance over M draws, averaged over n_seeds seeds.
VarianceEstimate mc_variance(const EstimatorSpec& spec, double K, std::size_t M,
                             std::size_t n_seeds, std::uint64_t seed_base);

}  // namespace loggrowth::est
