#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "loggrowth/csv.hpp"
#include "loggrowth/error.hpp"
#include "loggrowth/experiments.hpp"
#include "loggrowth/optim.hpp"
#include "loggrowth/rng.hpp"
#include "loggrowth/stats.hpp"

namespace loggrowth::exp {

namespace {

constexpr std::size_t kCheckpoints = 200;

// First checkpoint from which the curve stays at or below eta.
std::size_t first_passage(const std::vector<std::size_t>& ns, const std::vector<double>& curve,
                          double eta) {
  std::size_t idx = ns.size();
  for (std::size_t i = ns.size(); i-- > 0;) {
    if (curve[i] > eta) break;
    idx = i;
  }
  return idx < ns.size() ? ns[idx] : 0;
}

}  // namespace

Exp2Result run_exp2(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t seeds = cfg.seeds.value_or(
      std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(60 * cfg.scale))));
  const std::size_t n_iter =
      cfg.n_iter.value_or(static_cast<std::size_t>(std::llround(1.2e5 * cfg.scale)));
  if (n_iter < 100) throw ConfigError("exp2 needs at least 100 iterations");
  const auto ns = detail::log_checkpoints(10, n_iter, kCheckpoints);

  Exp2Result res;
  csv::Table t({"density", "n", "gap_median", "gap_q25", "gap_q75", "experiment", "schema_version",
                "seeds", "eps", "K0", "mu0", "estimator"});
  t.comment("projected Robbins-Monro SGD, step 2/(mu0 (n + 50)), paired estimator, warm start K* + 0.05");
  t.comment("gap: (H/2)(Kbar_n - K*)^2 of the tail average over k in (n/2, n]; median and quartiles across seeds");
  t.comment("scale " + csv::num(cfg.scale) + ": MC tolerances widen by 1/sqrt(scale) relative to scale 1");
  csv::Table f({"density", "gap_slope", "n_lo", "n_hi", "neta_slope", "proxy_vs_direct",
                "experiment", "schema_version", "seeds", "n_iter"});
  f.comment("gap_slope: OLS on log10-log10 of the median gap over n in [n_lo, n_hi]");
  f.comment("N(eta): first n at which the median tail-averaged gap falls below eta and stays below for the rest of the trace");
  csv::Table ne({"density", "eta", "N_eta", "experiment", "schema_version"});
  ne.comment("N(eta): first n at which the median tail-averaged gap falls below eta and stays below for the rest of the trace");

  for (const auto& id : cfg.densities) {
    const auto d = NoiseDensity::builtin(id);
    const auto dc = density_constants(d);
    const auto& c = dc.c;
    opt::PgConfig pc;
    pc.mode = opt::Mode::robbins_monro;
    pc.consts = c;
    pc.K0 = c.Kstar + 0.05;
    pc.rm_eps = 1e-5;
    pc.rm_estimator = est::Kind::paired_oracle;

    std::vector<std::vector<double>> gaps(ns.size());
    std::vector<double> final_K;
    for (std::size_t s = 0; s < seeds; ++s) {
      pc.seed = derive_seed(cfg.seed_base, detail::tag_of("exp2/" + id), s);
      const auto tr = opt::pg_robbins_monro(d, n_iter, pc);
      for (const auto& it : tr.iterates) {
        if (!c.basin.contains(it.K)) throw Error("invariant violated: iterate left the basin (" + id + ")");
      }
      const auto curve = opt::tail_average_curve(tr.iterates, ns);
      for (std::size_t i = 0; i < ns.size(); ++i) gaps[i].push_back(opt::gap_proxy(c, curve[i]));
      final_K.push_back(tr.final_K);
    }

    std::vector<double> med(ns.size());
    std::vector<double> xs;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      med[i] = stats::median(gaps[i]);
      const double q25 = stats::quantile(gaps[i], 0.25);
      const double q75 = stats::quantile(gaps[i], 0.75);
      res.rows.push_back({id, ns[i], med[i], q25, q75});
      t.add_row({id, csv::num(ns[i]), csv::num(med[i]), csv::num(q25), csv::num(q75), "exp2",
                 kSchemaVersion, csv::num(seeds), csv::num(pc.rm_eps), csv::num(pc.K0),
                 csv::num(c.mu0), "paired"});
      xs.push_back(static_cast<double>(ns[i]));
    }

    Exp2Fit fit;
    fit.density = id;
    const double n_lo = static_cast<double>(n_iter) / 10.0;
    fit.gap_slope = stats::loglog_slope(xs, med, n_lo, static_cast<double>(n_iter)).slope;

    // eta range: from the median gap a little past the start of the last two
    // decades down to just above the largest value seen in the final half.
    double tail_max = 0.0;
    double eta_hi = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (ns[i] >= n_iter / 2) tail_max = std::max(tail_max, med[i]);
      if (ns[i] <= n_iter / 100) eta_hi = med[i];
    }
    const double eta_lo = 1.2 * tail_max;
    std::vector<double> eta_x;
    std::vector<double> n_y;
    if (eta_hi > eta_lo) {
      for (double eta : stats::logspace(eta_hi, eta_lo, 8)) {
        const std::size_t N = first_passage(ns, med, eta);
        if (N == 0) continue;
        fit.n_eta.emplace_back(eta, N);
        ne.add_row({id, csv::num(eta), csv::num(N), "exp2", kSchemaVersion});
        eta_x.push_back(eta);
        n_y.push_back(static_cast<double>(N));
      }
    }
    fit.neta_slope = eta_x.size() >= 2 ? stats::loglog_slope(eta_x, n_y).slope : NAN;

    // Quadratic proxy against direct quadrature at the seed with the median final gap.
    std::vector<std::pair<double, double>> by_gap;
    for (double K : final_K) by_gap.emplace_back(opt::gap_proxy(c, K), K);
    std::sort(by_gap.begin(), by_gap.end());
    const auto [proxy, K_med] = by_gap[by_gap.size() / 2];
    const double direct = pv::cost_J(d, K_med) - pv::cost_J(d, c.Kstar);
    fit.proxy_vs_direct = std::abs(proxy - direct) / std::abs(direct);

    f.add_row({id, csv::num(fit.gap_slope), csv::num(n_lo), csv::num(n_iter),
               csv::num(fit.neta_slope), csv::num(fit.proxy_vs_direct), "exp2", kSchemaVersion,
               csv::num(seeds), csv::num(n_iter)});
    res.fits.push_back(std::move(fit));
  }
  if (cfg.out_dir) {
    t.write(*cfg.out_dir / "exp2.csv");
    f.write(*cfg.out_dir / "exp2_fits.csv");
    ne.write(*cfg.out_dir / "exp2_neta.csv");
  }
  return res;
}

}  // namespace loggrowth::exp
