#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "loggrowth/error.hpp"
#include "loggrowth/experiments.hpp"
#include "loggrowth/stats.hpp"

namespace {

using loggrowth::exp::ExperimentConfig;

struct Flags {
  std::string density = "all";
  std::optional<std::size_t> seeds;
  double scale = 0.25;
  std::string out;
  std::uint64_t seed_base = 20240601;
  std::string eta_grid;
  std::string eps_grid;
  std::string estimator;
  int kde_order = 2;
  double kde_ch = 1.0;
  std::optional<std::size_t> n_iter;
  std::optional<std::size_t> M;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--density", f.density, "D1|D2|D3|D4|all or a comma list");
  sub->add_option("--seeds", f.seeds, "independent replications");
  sub->add_option("--scale", f.scale, "size multiplier in (0, 1]")->capture_default_str();
  sub->add_option("--out", f.out, "output directory for CSV files");
  sub->add_option("--seed-base", f.seed_base, "root seed")->capture_default_str();
}

ExperimentConfig to_config(const Flags& f) {
  ExperimentConfig c;
  c.densities = loggrowth::exp::parse_density_list(f.density);
  c.seeds = f.seeds;
  c.scale = f.scale;
  c.out_dir = f.out.empty() ? std::filesystem::path(".") : std::filesystem::path(f.out);
  c.seed_base = f.seed_base;
  if (!f.eta_grid.empty()) c.eta_grid = loggrowth::exp::parse_grid(f.eta_grid);
  if (!f.eps_grid.empty()) c.eps_grid = loggrowth::exp::parse_grid(f.eps_grid);
  if (!f.estimator.empty()) {
    c.estimators.clear();
    std::stringstream in(f.estimator);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) c.estimators.push_back(item);
    }
  }
  c.kde_order = f.kde_order;
  c.kde_ch = f.kde_ch;
  c.n_iter = f.n_iter;
  c.M = f.M;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"log-growth optimisation experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* constants = app.add_subcommand("constants", "K*, Hessians and local constants");
  add_common(constants, f);

  auto* exp1 = app.add_subcommand("exp1", "estimator variance against eps");
  add_common(exp1, f);
  exp1->add_option("--eps-grid", f.eps_grid, "comma-separated eps values");
  exp1->add_option("--estimator", f.estimator, "naive, paired or a comma list");
  exp1->add_option("--M", f.M, "samples per seed");

  auto* exp2 = app.add_subcommand("exp2", "density-known Robbins-Monro rates");
  add_common(exp2, f);
  exp2->add_option("--n-iter", f.n_iter, "iterations per run");

  auto* exp3 = app.add_subcommand("exp3", "density-unknown comparison");
  add_common(exp3, f);
  exp3->add_option("--eta-grid", f.eta_grid, "comma-separated target gaps");
  exp3->add_option("--kde-order", f.kde_order, "2 or 4")->capture_default_str();
  exp3->add_option("--kde-ch", f.kde_ch, "bandwidth constant")->capture_default_str();
  exp3->add_option("--n-iter", f.n_iter, "Robbins-Monro iterations per run");

  auto* exp4 = app.add_subcommand("exp4", "quadrature ablation");
  add_common(exp4, f);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = to_config(f);
    if (constants->parsed()) {
      for (const auto& r : loggrowth::exp::run_constants(cfg)) {
        std::printf("%s K*=%.6f H=%.6f mu0=%.4g L0=%.4g tau=%.4g\n", r.density.c_str(), r.c.Kstar,
                    r.c.hessian_at_Kstar, r.c.mu0, r.c.L0, r.c.tau);
      }
    } else if (exp1->parsed()) {
      for (const auto& fit : loggrowth::exp::run_exp1(cfg).fits) {
        std::printf("%s %s slope=%.3f\n", fit.density.c_str(), fit.estimator.c_str(), fit.slope);
      }
    } else if (exp2->parsed()) {
      for (const auto& fit : loggrowth::exp::run_exp2(cfg).fits) {
        std::printf("%s gap_slope=%.3f neta_slope=%.3f\n", fit.density.c_str(), fit.gap_slope,
                    fit.neta_slope);
      }
    } else if (exp3->parsed()) {
      const auto r = loggrowth::exp::run_exp3(cfg);
      std::printf("%s naive_min=%.3f paired=%.3f alg2=%.3f plug=%.3f\n", r.density.c_str(),
                  r.naive_slope_min, r.paired_slope, r.alg2_slope, r.plug_slope);
    } else if (exp4->parsed()) {
      const auto r = loggrowth::exp::run_exp4(cfg);
      for (const char* s : {"parity_shell", "symmetric_cutoff", "naive_adaptive"}) {
        std::printf("%s max_err=%.3g\n", s, r.max_err(s));
      }
    }
  } catch (const loggrowth::Error& e) {
    std::fprintf(stderr, "loggrowth: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "loggrowth: %s\n", e.what());
    return 3;
  }
  return 0;
}
