#include "loggrowth/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "loggrowth/error.hpp"
#include "loggrowth/quadrature.hpp"
#include "loggrowth/rng.hpp"

namespace loggrowth::opt {

namespace {

enum Tag : std::uint64_t {
  kTagSigma = 0x5167,
  kTagIter = 0x1737,
  kTagKde = 0x4bde,
  kTagRm = 0x524d,
  kTagPhase = 0x9a5e,
};

std::size_t ceil_count(double x) {
  if (!std::isfinite(x)) throw ConfigError("derived sample count is not finite");
  return static_cast<std::size_t>(std::max(1.0, std::ceil(x)));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void finish_trace(PgTrace& t, const pv::LocalConstants& c, bool report_tail) {
  const std::size_t n = t.iterates.size() - 1;
  t.tail_average = tail_average(t.iterates, n);
  t.final_K = report_tail ? t.tail_average : t.iterates.back().K;
  t.final_gap_estimate = gap_proxy(c, t.final_K);
}

}  // namespace

double project(double K, Interval basin) { return basin.clamp(K); }

double gap_proxy(const pv::LocalConstants& c, double K) {
  const double d = K - c.Kstar;
  return 0.5 * c.hessian_at_Kstar * d * d;
}

double tail_average(const std::vector<Iterate>& it, std::size_t n) {
  return tail_average_curve(it, {n}).front();
}

std::vector<double> tail_average_curve(const std::vector<Iterate>& it,
                                       const std::vector<std::size_t>& ns) {
  std::vector<double> prefix(it.size(), 0.0);
  for (std::size_t k = 1; k < it.size(); ++k) prefix[k] = prefix[k - 1] + it[k].K;
  std::vector<double> out;
  out.reserve(ns.size());
  for (std::size_t n : ns) {
    if (n >= it.size()) throw ConfigError("tail average past the end of the trace");
    if (n == 0) {
      out.push_back(it[0].K);
      continue;
    }
    const std::size_t h = n / 2;
    out.push_back((prefix[n] - prefix[h]) / static_cast<double>(n - h));
  }
  return out;
}

PgTrace pg_density_known(const NoiseDensity& d, const PgConfig& cfg) {
  const auto& c = cfg.consts;
  require(cfg.mode == Mode::alg1, "pg_density_known needs mode alg1");
  require(cfg.eta > 0.0, "eta must be positive");
  require(c.basin.contains(cfg.K0), "K0 must lie in the basin");

  PgTrace t;
  t.eps = cfg.eta / (3.0 * c.cbar_b);
  const auto spec = est::EstimatorSpec::paired(d, t.eps);
  t.sigma2 = 0.0;
  const auto probe = c.basin.grid(9);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const auto v = est::mc_variance(spec, probe[i], cfg.sigma_probe_M, cfg.sigma_probe_seeds,
                                    derive_seed(cfg.seed, kTagSigma, i));
    t.sigma2 = std::max(t.sigma2, v.mean_var);
  }
  t.batch = cfg.batch_override.value_or(ceil_count(3.0 * t.sigma2 / (2.0 * c.mu0 * cfg.eta)));
  t.n_star = cfg.n_star_override.value_or(
      ceil_count(c.L0 / c.mu0 * std::log(3.0 * c.L0 * c.delta * c.delta / (2.0 * cfg.eta))));

  double K = cfg.K0;
  for (std::size_t n = 0; n < t.n_star; ++n) {
    const double g = est::mc_batch_mean(spec, K, t.batch, derive_seed(cfg.seed, kTagIter, n));
    t.iterates.push_back({n, K, g});
    K = project(K - g / c.L0, c.basin);
  }
  t.iterates.push_back({t.n_star, K, 0.0});
  t.iteration_samples = t.n_star * t.batch;
  finish_trace(t, c, false);
  return t;
}

PgTrace pg_robbins_monro(const NoiseDensity& d, std::size_t n_iter, const PgConfig& cfg) {
  const auto& c = cfg.consts;
  require(cfg.mode == Mode::robbins_monro, "pg_robbins_monro needs mode robbins_monro");
  require(n_iter >= 1, "n_iter must be at least 1");
  require(c.basin.contains(cfg.K0), "K0 must lie in the basin");
  PgTrace t;
  t.eps = cfg.rm_eps;
  const auto spec = cfg.rm_estimator == est::Kind::naive ? est::EstimatorSpec::naive(d, t.eps)
                                                         : est::EstimatorSpec::paired(d, t.eps);
  t.batch = 1;
  t.n_star = n_iter;
  t.iterates.reserve(n_iter + 1);
  Rng rng(derive_seed(cfg.seed, kTagRm));
  double K = cfg.K0;
  for (std::size_t n = 1; n <= n_iter; ++n) {
    const double g = spec.evaluate(d.draw(rng), K);
    t.iterates.push_back({n - 1, K, g});
    const double alpha = 2.0 / (c.mu0 * (static_cast<double>(n) + 50.0));
    K = project(K - alpha * g, c.basin);
  }
  t.iterates.push_back({n_iter, K, 0.0});
  t.iteration_samples = n_iter;
  finish_trace(t, c, true);
  return t;
}

PgTrace pg_density_unknown(const NoiseDensity& d, const PgConfig& cfg) {
  const auto& c = cfg.consts;
  require(cfg.mode == Mode::alg2, "pg_density_unknown needs mode alg2");
  require(cfg.alg2.has_value(), "algorithm 2 parameters are missing");
  require(cfg.eta > 0.0, "eta must be positive");
  require(c.basin.contains(cfg.K0), "K0 must lie in the basin");
  const Alg2Params& p = *cfg.alg2;
  const double s = p.s;

  PgTrace t;
  t.radius = std::min(p.c_R * std::pow(cfg.eta, 1.0 / (2.0 * s)), 0.5 * c.tau);
  t.eps = cfg.eta / (4.0 * c.cbar_b);
  t.n1 = ceil_count(p.c_1 * std::pow(cfg.eta, -(2.0 * s + 1.0) / (2.0 * s)));
  t.batch = cfg.batch_override.value_or(ceil_count(2.0 * p.C_sigma / (c.mu0 * t.radius * cfg.eta)));
  const double delta_bar = 0.5 * c.L0 * c.delta * c.delta;
  t.n_star =
      cfg.n_star_override.value_or(ceil_count(c.L0 / c.mu0 * std::log(4.0 * delta_bar / cfg.eta)));
  const double K_min = -c.basin.hi;
  if (t.eps > K_min * t.radius) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "eta = %.3g too large: eps = %.3g exceeds K_min * R = %.3g",
                  cfg.eta, t.eps, K_min * t.radius);
    throw ConfigError(buf);
  }

  const std::uint64_t kde_seed = cfg.kde_seed.value_or(derive_seed(cfg.seed, kTagKde));
  const auto kde_samples = d.sample(std::max<std::size_t>(t.n1, 2), kde_seed);
  t.kde = std::make_shared<const kde::KdeModel>(
      kde::KdeModel::build(kde_samples, p.s, p.c_h, d.support()));
  t.kde_samples = t.n1;
  const auto spec = est::EstimatorSpec::plugin(d, t.eps, t.kde, t.radius);

  double K = cfg.K0;
  for (std::size_t n = 0; n < t.n_star; ++n) {
    const double g = est::mc_batch_mean(spec, K, t.batch, derive_seed(cfg.seed, kTagIter, n));
    t.iterates.push_back({n, K, g});
    K = project(K - g / c.L0, c.basin);
  }
  t.iterates.push_back({t.n_star, K, 0.0});
  t.iteration_samples = t.n_star * t.batch;
  finish_trace(t, c, true);
  return t;
}

double exact_psi_variance(const DensitySurface& d, double K, double eps) {
  const Interval S = d.support();
  std::vector<double> cuts(d.breakpoints().begin(), d.breakpoints().end());
  const double bs = -1.0 / K;
  if (S.contains_open(bs)) {
    cuts.push_back(bs);
    for (double m : {-10.0, -1.0, 1.0, 10.0}) cuts.push_back(bs + m * eps / std::abs(K));
  }
  quad::Options q;
  q.abs_tol = 0.0;
  q.rel_tol = 1e-12;
  auto sq = [&](double b) {
    const double v = 1.0 + b * K;
    const double psi = b * v / (v * v + eps * eps);
    return d.pdf(b) * psi * psi;
  };
  const auto m2 = quad::integrate(sq, S.lo, S.hi, cuts, q);
  if (!m2.converged) throw NumericalError("exact_psi_variance: quadrature did not converge", m2.abs_error);
  const double m1 = pv::reg_gradient(d, K, eps);
  return m2.value - m1 * m1;
}

PhaseResult preliminary_phase(const NoiseDensity& d, double K0, Interval K_set,
                              Interval target_basin, std::uint64_t seed) {
  require(K_set.contains(K0), "K0 must lie in K_set");
  require(K_set.hi < 0.0 || K_set.lo > 0.0, "K_set must not contain 0");
  require(target_basin.width() > 0.0, "target basin must have positive width");
  PhaseResult r;
  r.K = K0;
  if (target_basin.contains(K0)) return r;

  r.mu1 = INFINITY;
  r.L1 = -INFINITY;
  for (double K : K_set.grid(pv::kBasinGrid)) {
    const double H = pv::hessian_decomposition(d, K, 1.0).total;
    r.mu1 = std::min(r.mu1, H);
    r.L1 = std::max(r.L1, H);
    r.sigma1_sq = std::max(r.sigma1_sq, exact_psi_variance(d, K, 1.0));
  }
  require(r.mu1 > 0.0, "J_1 is not strongly convex on K_set");
  const double delta = 0.5 * target_basin.width();
  r.batch = ceil_count(r.sigma1_sq / (r.mu1 * r.mu1 * std::pow(delta, 4)));
  r.t_max = ceil_count(4.0 * r.L1 / r.mu1 * std::log(K_set.width() / delta));

  const auto spec = est::EstimatorSpec::naive(d, 1.0);
  double K = K0;
  for (std::size_t t = 0; t < r.t_max; ++t) {
    const double g = est::mc_batch_mean(spec, K, r.batch, derive_seed(seed, kTagPhase, t));
    K = project(K - g / r.L1, K_set);
    r.samples += r.batch;
    r.iterations = t + 1;
    if (target_basin.contains(K)) {
      r.K = K;
      return r;
    }
  }
  throw PhaseFailureError("preliminary phase did not reach the target basin", K);
}

NewtonResult plug_and_solve(const DensitySurface& d, double K_warm, Interval basin, double mu0,
                            int max_iter) {
  require(basin.contains(K_warm), "warm start must lie in the basin");
  NewtonResult r;
  double K = K_warm;
  for (int it = 0;; ++it) {
    const double G = pv::pv_gradient(d, K);
    r.iterates.push_back(K);
    r.residuals.push_back(std::abs(G));
    if (std::abs(G) <= 1e-12) {
      r.converged = true;
      break;
    }
    if (it == max_iter) break;
    // The slope only steers the step; its last few ulps of quadrature error do not matter.
    pv::Options slope_opts;
    slope_opts.throw_on_failure = false;
    const double H = pv::hessian_decomposition(d, K, 0.0, slope_opts).total;
    if (!(H >= 0.5 * mu0)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "Newton slope %.4g below mu0/2 at K = %.10g", H, K);
      throw IllConditionedError(buf);
    }
    K = project(K - G / H, basin);
  }
  r.K = K;
  return r;
}

NewtonResult naive_newton(const DensitySurface& d, double K_warm, Interval basin, int max_iter) {
  require(basin.contains(K_warm), "warm start must lie in the basin");
  const pv::Options naive = pv::naive_options();
  constexpr double h = 1e-6;
  NewtonResult r;
  double K = K_warm;
  for (int it = 0;; ++it) {
    const double residual = std::abs(pv::pv_gradient(d, K));
    r.iterates.push_back(K);
    r.residuals.push_back(residual);
    if (residual <= 1e-12) {
      r.converged = true;
      break;
    }
    if (it == max_iter) break;
    const double G = pv::pv_gradient(d, K, naive);
    const double slope = (pv::pv_gradient(d, K + h, naive) - pv::pv_gradient(d, K - h, naive)) / (2.0 * h);
    if (!std::isfinite(slope) || slope == 0.0 || !std::isfinite(G)) continue;  // K stays put
    K = project(K - G / slope, basin);
  }
  r.K = K;
  return r;
}

}  // namespace loggrowth::opt
