#include <cmath>
#include <sstream>

#include "loggrowth/csv.hpp"
#include "loggrowth/error.hpp"
#include "loggrowth/experiments.hpp"
#include "loggrowth/pvcore.hpp"

namespace loggrowth::exp {

void ExperimentConfig::validate() const {
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("scale must lie in (0, 1]");
  if (densities.empty()) throw ConfigError("no densities selected");
  if (seeds && *seeds == 0) throw ConfigError("seed count must be positive");
  for (const auto& id : densities) NoiseDensity::builtin(id);
  if (kde_order != 2 && kde_order != 4) throw ConfigError("kde order must be 2 or 4");
  if (!(kde_ch > 0.0)) throw ConfigError("kde bandwidth constant must be positive");
  for (double e : eta_grid) {
    if (!(e > 0.0)) throw ConfigError("eta grid values must be positive");
  }
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw ConfigError("eps grid values must be positive");
  }
}

std::vector<std::string> parse_density_list(const std::string& s) {
  if (s == "all") return NoiseDensity::builtin_ids();
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    NoiseDensity::builtin(item);
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty density list");
  return out;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse grid value '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

double basin_delta(const NoiseDensity& d, double Kstar) {
  if (d.id() == "D2") return 0.14;
  return pv::widest_delta(d, Kstar);
}

DensityConstants density_constants(const NoiseDensity& d) {
  DensityConstants out;
  out.density = d.id();
  const double Ks = pv::find_Kstar(d);
  out.c = pv::local_constants(d, Ks, basin_delta(d, Ks));
  pv::Options no_kink;
  no_kink.register_breakpoints = false;
  out.H_no_kink = pv::hessian_decomposition(d, Ks, 0.0, no_kink).total;
  return out;
}

std::vector<DensityConstants> run_constants(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<DensityConstants> rows;
  csv::Table t({"density", "Kstar", "H", "H_no_kink", "b_sing", "mu0", "L0", "tau", "cbar_b",
                "experiment", "schema_version", "delta", "tau_basin", "mu0_joint", "L0_joint",
                "eps0", "grid_points"});
  t.comment("critical points, finite-part Hessians and local constants per density");
  t.comment("mu0/L0: extrema of the eps=0 Hessian over the basin grid; *_joint also over eps in {0, eps0/2, eps0}");
  t.comment("tau: pole-to-edge margin at K*; tau_basin: smallest margin over the basin");
  for (const auto& id : cfg.densities) {
    const auto d = NoiseDensity::builtin(id);
    auto dc = density_constants(d);
    const auto& c = dc.c;
    if (!(pv::pole_margin(d, c.Kstar) > 0.0)) {
      throw Error("invariant violated: pole of K* is not interior for " + id);
    }
    if (!(c.hessian_at_Kstar > 0.0)) {
      throw Error("invariant violated: finite-part Hessian at K* is not positive for " + id);
    }
    t.add_row({id, csv::num(c.Kstar), csv::num(c.hessian_at_Kstar), csv::num(dc.H_no_kink),
               csv::num(pv::b_sing(c.Kstar)), csv::num(c.mu0), csv::num(c.L0), csv::num(c.tau),
               csv::num(c.cbar_b), "constants", kSchemaVersion, csv::num(c.delta),
               csv::num(c.tau_basin), csv::num(c.mu0_joint), csv::num(c.L0_joint),
               csv::num(pv::kEps0), csv::num(pv::kBasinGrid)});
    rows.push_back(std::move(dc));
  }
  if (cfg.out_dir) t.write(*cfg.out_dir / "constants.csv");
  return rows;
}

}  // namespace loggrowth::exp
