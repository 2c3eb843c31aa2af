#include "loggrowth/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "loggrowth/error.hpp"
#include "loggrowth/rng.hpp"
#include "loggrowth/stats.hpp"

namespace loggrowth::est {

double psi_naive(double B, double K, double eps) {
  const double v = 1.0 + B * K;
  return B * v / (v * v + eps * eps);
}

double psi_pair(double B, double K, double eps, const DensitySurface& w, double radius,
                bool check_floor) {
  const Interval S = w.support();
  const double bs = -1.0 / K;
  if (!S.contains_open(bs)) return psi_naive(B, K, eps);
  const double s = B - bs;
  if (std::abs(s) > radius) return psi_naive(B, K, eps);
  if (s == 0.0) return 0.0;
  const double Bbar = bs - s;
  const double wB = w.pdf(B);
  const double wBbar = w.pdf(Bbar);
  if (check_floor && wB + wBbar < kKdeFloor) {
    throw DegenerateKdeError("estimated pair density below floor");
  }
  const double ks = K * s;
  return ks * (B * wB - Bbar * wBbar) / ((ks * ks + eps * eps) * (wB + wBbar));
}

double psi_paired(double B, double K, double eps, const NoiseDensity& d) {
  if (!d.support().contains(B)) throw DomainError("psi_paired: sample outside the support");
  const Interval S = d.support();
  const double bs = -1.0 / K;
  const double delta_K = std::min(bs - S.lo, S.hi - bs);
  return psi_pair(B, K, eps, d, delta_K);
}

double psi_plugin(double B, double K, double eps, const DensitySurface& m, double R) {
  return psi_pair(B, K, eps, m, R, true);
}

double pair_weight(const DensitySurface& w, double b, double K) {
  const double bs = -1.0 / K;
  const double bbar = bs - (b - bs);
  const double wb = w.pdf(b);
  return wb / (wb + w.pdf(bbar));
}

Kind parse_kind(const std::string& s) {
  if (s == "naive") return Kind::naive;
  if (s == "paired" || s == "paired_oracle") return Kind::paired_oracle;
  if (s == "plugin" || s == "paired_plugin") return Kind::paired_plugin;
  throw ConfigError("unknown estimator '" + s + "' (expected naive, paired or plugin)");
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::naive:
      return "naive";
    case Kind::paired_oracle:
      return "paired";
    case Kind::paired_plugin:
      return "plugin";
  }
  return "?";
}

EstimatorSpec EstimatorSpec::naive(const NoiseDensity& d, double eps) {
  if (!(eps > 0.0)) throw ConfigError("estimator eps must be positive");
  return {Kind::naive, eps, std::nullopt, d, nullptr};
}

EstimatorSpec EstimatorSpec::paired(const NoiseDensity& d, double eps) {
  if (!(eps > 0.0)) throw ConfigError("estimator eps must be positive");
  return {Kind::paired_oracle, eps, std::nullopt, d, nullptr};
}

EstimatorSpec EstimatorSpec::plugin(const NoiseDensity& d, double eps,
                                    std::shared_ptr<const kde::KdeModel> m, double R) {
  if (!(eps > 0.0)) throw ConfigError("estimator eps must be positive");
  if (!(R > 0.0)) throw ConfigError("plug-in radius must be positive");
  if (!m) throw ConfigError("plug-in estimator needs a KDE model");
  return {Kind::paired_plugin, eps, R, d, std::move(m)};
}

double EstimatorSpec::evaluate(double B, double K) const {
  switch (kind) {
    case Kind::naive:
      return psi_naive(B, K, eps);
    case Kind::paired_oracle:
      return psi_paired(B, K, eps, density);
    case Kind::paired_plugin:
      return psi_plugin(B, K, eps, *kde, *radius);
  }
  return 0.0;
}

namespace {

std::vector<double> draw_values(const EstimatorSpec& spec, double K, std::size_t N,
                                std::uint64_t seed) {
  if (N == 0) throw ConfigError("batch size must be at least 1");
  Rng rng(seed);
  std::vector<double> v(N);
  for (auto& x : v) x = spec.evaluate(spec.density.draw(rng), K);
  return v;
}

}  // namespace

double mc_batch_mean(const EstimatorSpec& spec, double K, std::size_t N, std::uint64_t seed) {
  return stats::mean(draw_values(spec, K, N, seed));
}

MeanWithSe mc_mean_se(const EstimatorSpec& spec, double K, std::size_t N, std::uint64_t seed) {
  const auto v = draw_values(spec, K, N, seed);
  return {stats::mean(v), N > 1 ? stats::std_error(v) : 0.0};
}

VarianceEstimate mc_variance(const EstimatorSpec& spec, double K, std::size_t M,
                             std::size_t n_seeds, std::uint64_t seed_base) {
  if (M < 1000) throw ConfigError("mc_variance needs M >= 1000");
  if (n_seeds < 2) throw ConfigError("mc_variance needs at least two seeds");
  std::vector<double> per_seed(n_seeds);
  for (std::size_t i = 0; i < n_seeds; ++i) {
    per_seed[i] = stats::variance(draw_values(spec, K, M, derive_seed(seed_base, 0x7661, i)));
  }
  return {stats::mean(per_seed), stats::std_error(per_seed)};
}

}  // namespace loggrowth::est
