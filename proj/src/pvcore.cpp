#include "loggrowth/pvcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "loggrowth/error.hpp"
#include "loggrowth/quadrature.hpp"
#include "loggrowth/roots.hpp"

namespace loggrowth::pv {

namespace {

constexpr double kEndpointGuard = 1e-12;

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

void require_nonzero(double K) {
  if (K == 0.0 || !std::isfinite(K)) throw ConfigError("gain K must be finite and nonzero");
}

std::vector<double> cuts_for(const DensitySurface& d, bool with_breakpoints) {
  std::vector<double> cuts;
  if (with_breakpoints) {
    const auto bp = d.breakpoints();
    cuts.assign(bp.begin(), bp.end());
  }
  return cuts;
}

struct Sum {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;

  void add(const quad::Result& r) {
    value += r.value;
    error += r.abs_error;
    converged = converged && r.converged;
  }
};

double finish(const Sum& s, bool throw_on_failure, const char* what) {
  if (!s.converged && throw_on_failure) throw NumericalError(what, s.error);
  return s.value;
}

// Integral of f(b) * v / (v^2 + eps^2) over the support, v = 1 + bK. With
// eps = 0 and the pole inside this is a principal value.
template <class F>
Sum odd_kernel_integral(const DensitySurface& d, F f, double K, double eps, const Options& o) {
  const Interval S = d.support();
  const double bs = b_sing(K);
  const double margin = pole_margin(d, K);
  std::vector<double> cuts = cuts_for(d, o.register_breakpoints);
  auto full = [&](double b) {
    const double v = 1.0 + b * K;
    return f(b) * v / (v * v + eps * eps);
  };
  quad::Options q;
  q.max_subdivisions = o.max_subdivisions;
  Sum out;

  if (o.scheme == Scheme::naive_adaptive) {
    q.abs_tol = o.abs_tol;
    out.add(quad::integrate(full, S.lo, S.hi, cuts, q));
    return out;
  }
  if (margin < 0.0 || (margin == 0.0 && eps > 0.0)) {
    q.abs_tol = o.abs_tol;
    out.add(quad::integrate(full, S.lo, S.hi, cuts, q));
    return out;
  }
  if (eps == 0.0 && margin < kEndpointGuard) {
    throw IllConditionedError(fmt("pole b_sing = %.17g sits on a support endpoint", bs));
  }

  q.abs_tol = o.abs_tol / 3.0;
  if (o.scheme == Scheme::symmetric_cutoff) {
    if (o.cutoff <= 0.0 || o.cutoff >= margin) {
      throw ConfigError(fmt("cutoff %.3g must lie in (0, pole margin %.3g)", o.cutoff, margin));
    }
    out.add(quad::integrate(full, S.lo, bs - o.cutoff, cuts, q));
    out.add(quad::integrate(full, bs + o.cutoff, S.hi, cuts, q));
    return out;
  }

  const double r = o.shell_fraction * margin;
  out.add(quad::integrate(full, S.lo, bs - r, cuts, q));
  out.add(quad::integrate(full, bs + r, S.hi, cuts, q));

  // On the shell the kernel is odd in s = b - b_sing, so pairing b_sing +- s
  // leaves only the odd part of f, which vanishes linearly at s = 0.
  std::vector<double> scuts;
  for (double p : cuts) {
    const double s = std::abs(p - bs);
    if (s > 0.0 && s < r) scuts.push_back(s);
  }
  if (eps > 0.0) {
    for (double m : {1.0, 10.0}) {
      const double s = m * eps / std::abs(K);
      if (s < r) scuts.push_back(s);
    }
  }
  const double fprime0 = eps > 0.0 ? 0.0 : (f(bs + 1e-6 * r) - f(bs - 1e-6 * r)) / (2e-6 * r);
  auto near = [&](double s) {
    if (s == 0.0) return eps > 0.0 ? 0.0 : 2.0 * fprime0 / K;
    const double ks = K * s;
    return (f(bs + s) - f(bs - s)) * ks / (ks * ks + eps * eps);
  };
  out.add(quad::integrate(near, 0.0, r, scuts, q));
  return out;
}

}  // namespace

Options naive_options() {
  Options o;
  o.scheme = Scheme::naive_adaptive;
  o.abs_tol = 1.49e-8;
  o.max_subdivisions = 50;
  o.throw_on_failure = false;
  return o;
}

double pole_margin(const DensitySurface& d, double K) {
  const Interval S = d.support();
  const double bs = b_sing(K);
  return std::min(bs - S.lo, S.hi - bs);
}

double cost_J(const DensitySurface& d, double K) {
  require_nonzero(K);
  std::vector<double> cuts = cuts_for(d, true);
  if (pole_margin(d, K) > 0.0) cuts.push_back(b_sing(K));
  quad::Options q;
  q.abs_tol = 1e-11;
  auto f = [&](double b) { return d.pdf(b) * std::log(std::abs(1.0 + b * K)); };
  const Interval S = d.support();
  Sum s;
  s.add(quad::integrate(f, S.lo, S.hi, cuts, q));
  return finish(s, true, "cost_J: quadrature did not converge");
}

double reg_cost(const DensitySurface& d, double K, double eps) {
  require_nonzero(K);
  if (!(eps > 0.0)) throw ConfigError("reg_cost needs eps > 0");
  std::vector<double> cuts = cuts_for(d, true);
  const double bs = b_sing(K);
  if (pole_margin(d, K) > 0.0) {
    cuts.push_back(bs);
    for (double m : {-1.0, 1.0}) cuts.push_back(bs + m * eps / std::abs(K));
  }
  quad::Options q;
  q.abs_tol = 1e-12;
  auto f = [&](double b) {
    const double v = 1.0 + b * K;
    return d.pdf(b) * 0.5 * std::log(v * v + eps * eps);
  };
  const Interval S = d.support();
  Sum s;
  s.add(quad::integrate(f, S.lo, S.hi, cuts, q));
  return finish(s, true, "reg_cost: quadrature did not converge");
}

double pv_gradient(const DensitySurface& d, double K, const Options& opts) {
  require_nonzero(K);
  auto f = [&](double b) { return b * d.pdf(b); };
  return finish(odd_kernel_integral(d, f, K, 0.0, opts), opts.throw_on_failure,
                "pv_gradient: quadrature did not converge");
}

double reg_gradient(const DensitySurface& d, double K, double eps) {
  require_nonzero(K);
  if (!(eps > 0.0)) throw ConfigError("reg_gradient needs eps > 0");
  auto f = [&](double b) { return b * d.pdf(b); };
  return finish(odd_kernel_integral(d, f, K, eps, Options{}), true,
                "reg_gradient: quadrature did not converge");
}

HessianParts hessian_decomposition(const DensitySurface& d, double K, double eps,
                                   const Options& opts) {
  require_nonzero(K);
  if (eps < 0.0) throw ConfigError("hessian_decomposition needs eps >= 0");
  const Interval S = d.support();
  if (eps == 0.0 && std::abs(pole_margin(d, K)) < kEndpointGuard) {
    throw IllConditionedError(fmt("pole b_sing = %.17g sits on a support endpoint", b_sing(K)));
  }
  auto edge = [&](double b) {
    const double v = 1.0 + b * K;
    return d.pdf(b) * b * b * v / (v * v + eps * eps);
  };
  auto g = [&](double b) { return 2.0 * b * d.pdf(b) + b * b * d.dpdf(b); };
  HessianParts h;
  h.boundary_term = (edge(S.hi) - edge(S.lo)) / K;
  h.integral_term = -finish(odd_kernel_integral(d, g, K, eps, opts), opts.throw_on_failure,
                            "hessian_decomposition: quadrature did not converge") /
                    K;
  h.total = h.boundary_term + h.integral_term;
  return h;
}

double find_Kstar(const DensitySurface& d) {
  const Interval S = d.support();
  const double a = -1.0 / S.lo;
  const double b = -1.0 / S.hi;
  const double pad = 1e-6 * (b - a);
  // Only the sign matters near the bracket ends, where the pole hugs an endpoint.
  Options loose;
  loose.throw_on_failure = false;
  double root;
  try {
    root = brent([&](double K) { return pv_gradient(d, K, loose); }, a + pad, b - pad, 1e-10).root;
  } catch (const RootNotFoundError&) {
    throw RootNotFoundError("find_Kstar: no sign change of the principal-value gradient");
  }
  if (!(pole_margin(d, root) > 0.0)) {
    throw Error(fmt("find_Kstar: pole of K* = %.17g is not interior", root));
  }
  pv_gradient(d, root);
  return root;
}

double find_Kstar_eps(const DensitySurface& d, double eps, Interval basin) {
  try {
    return brent([&](double K) { return reg_gradient(d, K, eps); }, basin.lo, basin.hi, 1e-12).root;
  } catch (const RootNotFoundError&) {
    throw PersistenceError(fmt("no regularized critical point on the basin at eps = %.3g", eps));
  }
}

LocalConstants local_constants(const DensitySurface& d, double Kstar, double delta) {
  if (!(delta > 0.0)) throw ConfigError("local_constants needs delta > 0");
  LocalConstants c;
  c.Kstar = Kstar;
  c.delta = delta;
  c.basin = {Kstar - delta, Kstar + delta};
  const std::vector<double> grid = c.basin.grid(kBasinGrid);
  c.tau = pole_margin(d, Kstar);
  c.tau_basin = INFINITY;
  for (double K : grid) c.tau_basin = std::min(c.tau_basin, pole_margin(d, K));
  if (!(c.tau_basin > 0.0) || !(c.basin.hi < 0.0)) {
    throw ConfigError(fmt("basin of half-width %.3g around K* = %.6g pushes the pole out of the support",
                          delta, Kstar));
  }
  c.mu0 = INFINITY;
  c.L0 = -INFINITY;
  c.mu0_joint = INFINITY;
  c.L0_joint = -INFINITY;
  c.cbar_b = 0.0;
  for (double K : grid) {
    for (double eps : {0.0, 0.5 * kEps0, kEps0}) {
      const double H = hessian_decomposition(d, K, eps).total;
      if (eps == 0.0) {
        c.mu0 = std::min(c.mu0, H);
        c.L0 = std::max(c.L0, H);
      }
      c.mu0_joint = std::min(c.mu0_joint, H);
      c.L0_joint = std::max(c.L0_joint, H);
    }
    c.cbar_b = std::max(c.cbar_b, std::numbers::pi * d.pdf(b_sing(K)) / std::abs(K));
  }
  c.hessian_at_Kstar = hessian_decomposition(d, Kstar, 0.0).total;
  if (!(c.mu0 > 0.0)) {
    throw ConfigError("local_constants: Hessian is not positive on the basin");
  }
  return c;
}

double widest_delta(const DensitySurface& d, double Kstar) {
  for (int k = 20; k >= 5; --k) {
    const double delta = 0.01 * k;
    if (Kstar + delta >= 0.0) continue;
    if (pole_margin(d, Kstar - delta) >= 0.05 && pole_margin(d, Kstar + delta) >= 0.05) return delta;
  }
  throw ConfigError("widest_delta: no admissible basin half-width");
}

double shell_excluded_abs_integral(const DensitySurface& d, double K, double w) {
  require_nonzero(K);
  const Interval S = d.support();
  const double bs = b_sing(K);
  std::vector<double> cuts = cuts_for(d, true);
  auto f = [&](double b) { return std::abs(b * d.pdf(b) / (1.0 + b * K)); };
  quad::Options q;
  q.abs_tol = 1e-10;
  Sum s;
  if (bs - w > S.lo) s.add(quad::integrate(f, S.lo, bs - w, cuts, q));
  if (bs + w < S.hi) s.add(quad::integrate(f, bs + w, S.hi, cuts, q));
  return finish(s, true, "shell_excluded_abs_integral: quadrature did not converge");
}

}  // namespace loggrowth::pv
