#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "loggrowth/csv.hpp"
#include "loggrowth/error.hpp"
#include "loggrowth/experiments.hpp"
#include "loggrowth/kde.hpp"
#include "loggrowth/optim.hpp"
#include "loggrowth/rng.hpp"
#include "loggrowth/stats.hpp"

namespace loggrowth::exp {

namespace {

constexpr std::size_t kRmCheckpoints = 40;
const std::vector<double> kLadder = {1e3, 3e3, 1e4, 3e4, 1e5};

struct Accum {
  std::vector<double> gaps;
  void add(double g) { gaps.push_back(g); }
  double mean() const { return stats::mean(gaps); }
  double se() const { return gaps.size() >= 2 ? stats::std_error(gaps) : NAN; }
};

// Steepest OLS slope over windows [n, 10 n] of a log-log trace.
double steepest_decade_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double best = INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] * 10.0 > x.back() * (1.0 + 1e-12)) break;
    const auto fit = stats::loglog_slope(x, y, x[i], x[i] * 10.0);
    if (fit.points >= 3) best = std::min(best, fit.slope);
  }
  return best;
}

}  // namespace

Exp3Result run_exp3(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string id = cfg.densities.size() == 1 ? cfg.densities.front() : "D2";
  const auto d = NoiseDensity::builtin(id);
  const std::size_t seeds = cfg.seeds.value_or(
      std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(40 * cfg.scale))));
  const std::size_t n_iter =
      cfg.n_iter.value_or(static_cast<std::size_t>(std::llround(4e5 * cfg.scale)));
  if (n_iter < 1000) throw ConfigError("exp3 needs at least 1000 Robbins-Monro iterations");
  std::vector<double> eta_grid = cfg.eta_grid.empty() ? stats::logspace(5e-2, 9e-5, 8) : cfg.eta_grid;
  std::sort(eta_grid.begin(), eta_grid.end(), std::greater<>());

  const auto dc = density_constants(d);
  const auto& c = dc.c;
  const double K_warm = c.Kstar + 0.05;
  if (!c.basin.contains(K_warm)) throw Error("invariant violated: warm start outside the basin for " + id);

  Exp3Result res;
  res.density = id;
  csv::Table t({"method", "total_samples", "eta", "gap_mean", "gap_se", "experiment",
                "schema_version", "density", "seeds"});
  t.comment("gap: (H/2)(K - K*)^2 under the true density; mean and standard error across seeds");
  t.comment("naive_sgd / paired_sgd: projected Robbins-Monro with eps = 1e-5, tail-averaged, one sample per step");
  t.comment("alg2: plug-in paired estimator on a KDE; total_samples counts KDE and iteration draws");
  t.comment("plug_and_solve: Newton on the KDE finite-part condition; total_samples is the KDE sample size");
  t.comment("scale " + csv::num(cfg.scale) + ": MC tolerances widen by 1/sqrt(scale) relative to scale 1");

  auto emit = [&](const std::string& method, double samples, double eta, const Accum& a) {
    res.rows.push_back({method, samples, eta, a.mean(), a.se()});
    t.add_row({method, csv::num(samples), csv::num(eta), csv::num(a.mean()), csv::num(a.se()), "exp3",
               kSchemaVersion, id, csv::num(a.gaps.size())});
  };

  // Robbins-Monro traces.
  const auto ns = detail::log_checkpoints(100, n_iter, kRmCheckpoints);
  std::vector<double> ns_d(ns.begin(), ns.end());
  for (const auto kind : {est::Kind::naive, est::Kind::paired_oracle}) {
    const std::string method = kind == est::Kind::naive ? "naive_sgd" : "paired_sgd";
    opt::PgConfig pc;
    pc.mode = opt::Mode::robbins_monro;
    pc.consts = c;
    pc.K0 = K_warm;
    pc.rm_eps = 1e-5;
    pc.rm_estimator = kind;
    std::vector<Accum> acc(ns.size());
    for (std::size_t s = 0; s < seeds; ++s) {
      pc.seed = derive_seed(cfg.seed_base, detail::tag_of("exp3/" + id + "/" + method), s);
      const auto tr = opt::pg_robbins_monro(d, n_iter, pc);
      const auto curve = opt::tail_average_curve(tr.iterates, ns);
      for (std::size_t i = 0; i < ns.size(); ++i) acc[i].add(opt::gap_proxy(c, curve[i]));
    }
    std::vector<double> means;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      emit(method, ns_d[i], NAN, acc[i]);
      means.push_back(acc[i].mean());
    }
    if (kind == est::Kind::naive) {
      res.naive_slope_min = steepest_decade_slope(ns_d, means);
    } else {
      res.paired_slope =
          stats::loglog_slope(ns_d, means, ns_d.back() / 10.0, ns_d.back()).slope;
    }
  }

  // Algorithm 2 over the eta grid.
  opt::Alg2Params p;
  p.s = cfg.kde_order;
  p.c_h = cfg.kde_ch;
  std::vector<double> a_x;
  std::vector<double> a_y;
  res.alg2_gap_below_eta = true;
  res.alg2_max_gap_over_eta = 0.0;
  for (std::size_t e = 0; e < eta_grid.size(); ++e) {
    const double eta = eta_grid[e];
    opt::PgConfig pc;
    pc.mode = opt::Mode::alg2;
    pc.alg2 = p;
    pc.consts = c;
    pc.K0 = K_warm;
    pc.eta = eta;
    Accum acc;
    double samples = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      pc.seed = derive_seed(cfg.seed_base, detail::tag_of("exp3/" + id + "/alg2"), e * 1000003 + s);
      const auto tr = opt::pg_density_unknown(d, pc);
      acc.add(opt::gap_proxy(c, tr.final_K));
      samples = static_cast<double>(tr.samples_used());
    }
    emit("alg2", samples, eta, acc);
    a_x.push_back(samples);
    a_y.push_back(acc.mean());
    if (acc.mean() > eta) res.alg2_gap_below_eta = false;
    res.alg2_max_gap_over_eta = std::max(res.alg2_max_gap_over_eta, acc.mean() / eta);
  }
  res.alg2_slope = a_x.size() >= 2 ? stats::loglog_slope(a_x, a_y).slope : NAN;

  // Plug-and-solve over the KDE sample ladder.
  std::vector<double> p_x;
  std::vector<double> p_y;
  std::size_t failures = 0;
  for (std::size_t l = 0; l < kLadder.size(); ++l) {
    const auto n1 = static_cast<std::size_t>(kLadder[l]);
    Accum acc;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto seed = derive_seed(cfg.seed_base, detail::tag_of("exp3/" + id + "/plug"), l * 1000003 + s);
      const auto samples = d.sample(n1, seed);
      const auto m = kde::KdeModel::build(samples, cfg.kde_order, cfg.kde_ch, d.support());
      try {
        const auto r = opt::plug_and_solve(m, K_warm, c.basin, c.mu0);
        acc.add(opt::gap_proxy(c, r.K));
      } catch (const IllConditionedError&) {
        ++failures;
      } catch (const NumericalError&) {
        ++failures;
      }
    }
    if (acc.gaps.empty()) continue;
    emit("plug_and_solve", kLadder[l], NAN, acc);
    p_x.push_back(kLadder[l]);
    p_y.push_back(acc.mean());
  }
  res.plug_slope = p_x.size() >= 2 ? stats::loglog_slope(p_x, p_y).slope : NAN;
  if (failures) t.comment("plug_and_solve runs dropped as ill-conditioned: " + std::to_string(failures));

  csv::Table f({"density", "naive_slope_min", "paired_slope", "alg2_slope", "plug_slope",
                "alg2_gap_below_eta", "alg2_max_gap_over_eta", "experiment", "schema_version"});
  f.comment("naive_slope_min: steepest one-decade OLS slope of the naive trace");
  f.comment("paired_slope: last decade of n; alg2_slope and plug_slope: all points");
  f.add_row({id, csv::num(res.naive_slope_min), csv::num(res.paired_slope), csv::num(res.alg2_slope),
             csv::num(res.plug_slope), res.alg2_gap_below_eta ? "1" : "0",
             csv::num(res.alg2_max_gap_over_eta), "exp3", kSchemaVersion});
  if (cfg.out_dir) {
    t.write(*cfg.out_dir / "exp3.csv");
    f.write(*cfg.out_dir / "exp3_fits.csv");
  }
  return res;
}

}  // namespace loggrowth::exp
