#include <algorithm>
#include <cmath>
#include <numbers>

#include "internal.hpp"
#include "loggrowth/csv.hpp"
#include "loggrowth/error.hpp"
#include "loggrowth/estimators.hpp"
#include "loggrowth/experiments.hpp"
#include "loggrowth/pvcore.hpp"
#include "loggrowth/rng.hpp"
#include "loggrowth/stats.hpp"

namespace loggrowth::exp {

Exp1Result run_exp1(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t M = cfg.M.value_or(
      static_cast<std::size_t>(std::llround(4e5 * cfg.scale)));
  const std::size_t seeds = cfg.seeds.value_or(
      std::max<std::size_t>(6, static_cast<std::size_t>(std::llround(12 * cfg.scale))));
  std::vector<double> eps_grid = cfg.eps_grid.empty() ? stats::logspace(1e-1, 1e-5, 9) : cfg.eps_grid;
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
  const double eps_min = eps_grid.back();

  Exp1Result res;
  csv::Table t({"density", "estimator", "eps", "M", "seeds", "mean_var", "se", "experiment",
                "schema_version", "K", "seed_base"});
  t.comment("single-sample estimator variance at K = K*; mean_var averages per-seed sample variances, se is across seeds");
  t.comment("scale " + csv::num(cfg.scale) + ": MC tolerances widen by 1/sqrt(scale) relative to scale 1");
  csv::Table f({"density", "estimator", "slope", "eps_lo", "eps_hi", "points", "var_eps_min",
                "prediction", "plateau", "plateau_change", "naive_paired_ratio", "experiment",
                "schema_version"});
  f.comment("slope: OLS of log10 mean_var on log10 eps over [eps_lo, eps_hi]");
  f.comment("prediction (naive): pi rho(b_sing(K*)) / (2 |K*|^3), compared with var * eps at eps_lo");

  for (const auto& id : cfg.densities) {
    const auto d = NoiseDensity::builtin(id);
    const double Ks = pv::find_Kstar(d);
    double naive_min = NAN;
    double paired_min = NAN;
    std::vector<Exp1Fit> fits_here;
    for (const auto& name : cfg.estimators) {
      const auto kind = est::parse_kind(name);
      if (kind == est::Kind::paired_plugin) throw ConfigError("exp1 supports naive and paired");
      std::vector<double> xs;
      std::vector<double> ys;
      double var_1e3 = NAN;
      double best_1e3 = INFINITY;
      double var_min = NAN;
      for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double eps = eps_grid[i];
        const auto spec = kind == est::Kind::naive ? est::EstimatorSpec::naive(d, eps)
                                                   : est::EstimatorSpec::paired(d, eps);
        const auto v = est::mc_variance(
            spec, Ks, M, seeds, derive_seed(cfg.seed_base, detail::tag_of(id + "/" + est::to_string(kind)), i));
        res.rows.push_back({id, est::to_string(kind), eps, M, seeds, v.mean_var, v.se});
        t.add_row({id, est::to_string(kind), csv::num(eps), csv::num(M), csv::num(seeds),
                   csv::num(v.mean_var), csv::num(v.se), "exp1", kSchemaVersion, csv::num(Ks),
                   std::to_string(cfg.seed_base)});
        xs.push_back(eps);
        ys.push_back(v.mean_var);
        if (std::abs(std::log10(eps) + 3.0) < best_1e3) {
          best_1e3 = std::abs(std::log10(eps) + 3.0);
          var_1e3 = v.mean_var;
        }
        if (eps == eps_min) var_min = v.mean_var;
      }
      Exp1Fit fit;
      fit.density = id;
      fit.estimator = est::to_string(kind);
      fit.slope = xs.size() >= 2 ? stats::loglog_slope(xs, ys).slope : NAN;
      if (kind == est::Kind::naive) {
        fit.var_eps_min = var_min * eps_min;
        fit.prediction = std::numbers::pi * d.pdf(pv::b_sing(Ks)) / (2.0 * std::pow(std::abs(Ks), 3));
        fit.plateau = NAN;
        fit.plateau_change = NAN;
        naive_min = var_min;
      } else {
        fit.var_eps_min = NAN;
        fit.prediction = NAN;
        fit.plateau = var_min;
        fit.plateau_change = std::abs(var_min / var_1e3 - 1.0);
        paired_min = var_min;
      }
      fits_here.push_back(fit);
    }
    const double ratio = naive_min / paired_min;
    if (!std::isnan(ratio)) res.ratio.emplace_back(id, ratio);
    for (const auto& fit : fits_here) {
      f.add_row({fit.density, fit.estimator, csv::num(fit.slope), csv::num(eps_min),
                 csv::num(eps_grid.front()), csv::num(eps_grid.size()), csv::num(fit.var_eps_min),
                 csv::num(fit.prediction), csv::num(fit.plateau), csv::num(fit.plateau_change),
                 csv::num(ratio), "exp1", kSchemaVersion});
      res.fits.push_back(fit);
    }
  }
  if (cfg.out_dir) {
    t.write(*cfg.out_dir / "exp1.csv");
    f.write(*cfg.out_dir / "exp1_fits.csv");
  }
  return res;
}

}  // namespace loggrowth::exp
