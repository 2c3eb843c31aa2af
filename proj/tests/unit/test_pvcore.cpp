#include <doctest.h>

#include <cmath>
#include <numbers>

#include "loggrowth/densities.hpp"
#include "loggrowth/error.hpp"
#include "loggrowth/pvcore.hpp"
#include "loggrowth/quadrature.hpp"

using namespace loggrowth;

namespace {

// Closed forms for the unit uniform on [0.5, 1.5].
double uniform_J(double K) {
  auto F = [K](double b) {
    const double v = 1.0 + b * K;
    return v / K * (std::log(std::abs(v)) - 1.0);
  };
  return F(1.5) - F(0.5);
}

double uniform_G(double K) {
  return (1.0 / K) * (1.0 - (1.0 / K) * std::log(std::abs((1.0 + 1.5 * K) / (1.0 + 0.5 * K))));
}

}  // namespace

TEST_CASE("cost on the uniform matches its antiderivative") {
  const auto d1 = NoiseDensity::builtin("D1");
  CHECK(std::abs(pv::cost_J(d1, -1e-9)) < 1e-8);
  CHECK(std::abs(pv::cost_J(d1, -0.835) - uniform_J(-0.835)) < 1e-9);
}

TEST_CASE("regularized cost converges quadratically when the pole is outside") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double K = -0.3;
  const double a = std::abs(pv::reg_cost(d2, K, 1e-2) - pv::cost_J(d2, K));
  const double b = std::abs(pv::reg_cost(d2, K, 1e-3) - pv::cost_J(d2, K));
  CHECK(a < 1e-3);
  CHECK(b < a / 50.0);
}

TEST_CASE("bias coefficient at the optimum") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double Ks = pv::find_Kstar(d2);
  const double eps = 1e-4;
  const double slope = (pv::reg_cost(d2, Ks, eps) - pv::cost_J(d2, Ks)) / eps;
  const double cb = std::numbers::pi * d2.pdf(pv::b_sing(Ks)) / std::abs(Ks);
  CHECK(std::abs(slope / cb - 1.0) < 0.02);
  CHECK(std::abs(cb / 4.96 - 1.0) < 0.02);
}

TEST_CASE("principal-value gradient on the uniform") {
  const auto d1 = NoiseDensity::builtin("D1");
  CHECK(std::abs(pv::pv_gradient(d1, -0.835)) < 1e-2);
  for (double K = -0.9; K <= -0.7; K += 0.01) {
    CAPTURE(K);
    CHECK(std::abs(pv::pv_gradient(d1, K) - uniform_G(K)) < 1e-9);
  }
  const double root = pv::find_Kstar(d1);
  CHECK(std::abs(root - (-0.835)) < 5e-4);
}

TEST_CASE("pole outside the support reduces to ordinary quadrature") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double K = -0.1;
  auto plain = quad::integrate([&](double b) { return b * d2.pdf(b) / (1.0 + b * K); }, 0.5, 1.5);
  CHECK(std::abs(pv::pv_gradient(d2, K) - plain.value) < 1e-12);
}

TEST_CASE("finite differences of the cost match the principal value") {
  for (const auto& id : NoiseDensity::builtin_ids()) {
    const auto d = NoiseDensity::builtin(id);
    for (double K : {-0.75, -0.85, -0.95, -1.1}) {
      CAPTURE(id);
      CAPTURE(K);
      const double h = 1e-5;
      const double fd = (pv::cost_J(d, K + h) - pv::cost_J(d, K - h)) / (2 * h);
      CHECK(std::abs(fd - pv::pv_gradient(d, K)) < 1e-4);
    }
  }
}

TEST_CASE("regularized gradient approaches the principal value linearly in eps") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double Ks = pv::find_Kstar(d2);
  const double bs = pv::b_sing(Ks);
  const double c1 = std::numbers::pi * std::abs(d2.dpdf(bs) * bs + d2.pdf(bs)) / (Ks * Ks);
  const double g0 = pv::pv_gradient(d2, Ks);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    CAPTURE(eps);
    const double ratio = std::abs(pv::reg_gradient(d2, Ks, eps) - g0) / eps;
    CHECK(ratio < 1.1 * c1);
    CHECK(ratio > 0.5 * c1);
  }
}

TEST_CASE("finite-part Hessians") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double K2 = pv::find_Kstar(d2);
  const auto h = pv::hessian_decomposition(d2, K2, 0.0);
  CHECK(std::abs(h.total / 16.97 - 1.0) < 0.01);
  CHECK(h.total == h.boundary_term + h.integral_term);

  // Independent check for every density: slope of the principal-value gradient.
  for (const auto& id : NoiseDensity::builtin_ids()) {
    CAPTURE(id);
    const auto d = NoiseDensity::builtin(id);
    const double Ks = pv::find_Kstar(d);
    const double step = 1e-5;
    const double fd = (pv::pv_gradient(d, Ks + step) - pv::pv_gradient(d, Ks - step)) / (2 * step);
    CHECK(std::abs(pv::hessian_decomposition(d, Ks, 0.0).total - fd) < 1e-4 * fd);
  }
}

TEST_CASE("kink registration does not change the converged D4 Hessian") {
  const auto d4 = NoiseDensity::builtin("D4");
  const double Ks = pv::find_Kstar(d4);
  pv::Options off;
  off.register_breakpoints = false;
  const double with = pv::hessian_decomposition(d4, Ks, 0.0).total;
  const double without = pv::hessian_decomposition(d4, Ks, 0.0, off).total;
  CHECK(without > 24.0);
  CHECK(without < 28.0);
  CHECK(std::abs(with - without) < 1e-6);
}

TEST_CASE("Hessian is continuous in eps at zero") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double Ks = pv::find_Kstar(d2);
  for (double K : Interval{Ks - 0.14, Ks + 0.14}.grid(41)) {
    CAPTURE(K);
    const double a = pv::hessian_decomposition(d2, K, 0.0).total;
    const double b = pv::hessian_decomposition(d2, K, 1e-6).total;
    CHECK(std::abs(a - b) <= 1e-3);
  }
}

TEST_CASE("critical points and the strict cusp") {
  CHECK(std::abs(pv::find_Kstar(NoiseDensity::builtin("D1")) + 0.835) < 5e-4);
  CHECK(std::abs(pv::find_Kstar(NoiseDensity::builtin("D3")) + 0.930) < 5e-4);
  for (const auto& id : NoiseDensity::builtin_ids()) {
    const auto d = NoiseDensity::builtin(id);
    CHECK(d.support().contains_open(pv::b_sing(pv::find_Kstar(d))));
  }
}

TEST_CASE("regularized critical points persist") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double Ks = pv::find_Kstar(d2);
  const Interval basin{Ks - 0.14, Ks + 0.14};
  CHECK(std::abs(pv::find_Kstar_eps(d2, 1e-8, basin) - Ks) < 1e-7);
  std::vector<double> ratio;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double Ke = pv::find_Kstar_eps(d2, eps, basin);
    ratio.push_back(std::abs(Ke - Ks) / eps);
  }
  CHECK(std::abs(ratio[2] / ratio[1] - 1.0) < 0.05);
  CHECK(std::abs(ratio[1] / ratio[0] - 1.0) < 0.2);

  const auto c = pv::local_constants(d2, Ks, 0.14);
  const double CK = ratio[2];
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double Ke = pv::find_Kstar_eps(d2, eps, basin);
    const double gap = pv::reg_cost(d2, Ks, eps) - pv::reg_cost(d2, Ke, eps);
    CHECK(gap >= -1e-12);
    CHECK(gap <= 0.5 * c.L0 * 1.2 * CK * CK * eps * eps);
  }
  CHECK_THROWS_AS(pv::find_Kstar_eps(d2, 1e-3, Interval{-0.7, -0.6}), PersistenceError);
}

TEST_CASE("local constants on D2") {
  const auto d2 = NoiseDensity::builtin("D2");
  const auto c = pv::local_constants(d2, -0.928, 0.14);
  CHECK(std::abs(c.mu0 / 6.96 - 1.0) < 0.02);
  CHECK(std::abs(c.L0 / 31.30 - 1.0) < 0.02);
  CHECK(std::abs(c.tau - 0.422) < 1e-3);
  CHECK(std::abs(c.cbar_b / 4.96 - 1.0) < 0.02);
  CHECK(c.mu0 <= c.L0);

  double prev = 0.0;
  std::vector<double> kappa;
  for (double delta = 0.05; delta <= 0.2001; delta += 0.025) {
    const auto cd = pv::local_constants(d2, -0.928, delta);
    kappa.push_back(cd.L0 / cd.mu0);
    CHECK(kappa.back() > prev);
    prev = kappa.back();
  }
  MESSAGE("L0/mu0 from " << kappa.front() << " to " << kappa.back());
  CHECK_THROWS_AS(pv::local_constants(d2, -0.928, 0.0), ConfigError);
  CHECK_THROWS_AS(pv::local_constants(d2, -0.928, 0.5), ConfigError);
}

TEST_CASE("PL inequality on the D2 basin") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double Ks = pv::find_Kstar(d2);
  const auto c = pv::local_constants(d2, Ks, 0.14);
  for (double eps : {0.0, 1e-3, 1e-2}) {
    const double Ke = eps == 0.0 ? Ks : pv::find_Kstar_eps(d2, eps, c.basin);
    auto J = [&](double K) { return eps == 0.0 ? pv::cost_J(d2, K) : pv::reg_cost(d2, K, eps); };
    auto G = [&](double K) { return eps == 0.0 ? pv::pv_gradient(d2, K) : pv::reg_gradient(d2, K, eps); };
    const double Jstar = J(Ke);
    for (double K : c.basin.grid(41)) {
      CAPTURE(eps);
      CAPTURE(K);
      const double g = G(K);
      CHECK(0.5 * g * g >= c.mu0 * (J(K) - Jstar) - 1e-10);
    }
  }
}

TEST_CASE("shell-excluded absolute integrals grow without bound") {
  const auto d2 = NoiseDensity::builtin("D2");
  const double Ks = pv::find_Kstar(d2);
  double prev = 0.0;
  std::vector<double> v;
  for (int k = 4; k <= 20; ++k) {
    v.push_back(pv::shell_excluded_abs_integral(d2, Ks, std::ldexp(1.0, -k)));
    CHECK(v.back() > prev);
    prev = v.back();
  }
  // Logarithmic growth: roughly constant increments per halving.
  const double inc_lo = v[1] - v[0];
  const double inc_hi = v.back() - v[v.size() - 2];
  CHECK(inc_hi > 0.5 * inc_lo);
}

TEST_CASE("parity shell against a symmetric cutoff") {
  for (const auto& id : {"D1", "D2", "D3"}) {
    CAPTURE(id);
    const auto d = NoiseDensity::builtin(id);
    const double K = pv::find_Kstar(d);
    const double bs = pv::b_sing(K);
    pv::Options cut;
    cut.scheme = pv::Scheme::symmetric_cutoff;
    cut.cutoff = 1e-6;
    // The excluded window carries 2 f'(b_sing) h / K with f = b rho.
    const double fprime = d.pdf(bs) + bs * d.dpdf(bs);
    const double predicted = 2.0 * fprime * cut.cutoff / K;
    const double diff = pv::pv_gradient(d, K) - pv::pv_gradient(d, K, cut);
    CHECK(std::abs(diff - predicted) <= 1e-8);
  }
}

TEST_CASE("error paths") {
  const auto d2 = NoiseDensity::builtin("D2");
  CHECK_THROWS_AS(pv::pv_gradient(d2, -1.0 / 1.5), IllConditionedError);
  CHECK_THROWS_AS(pv::hessian_decomposition(d2, -2.0, 0.0), IllConditionedError);
  CHECK_THROWS_AS(pv::pv_gradient(d2, 0.0), ConfigError);
  CHECK_THROWS_AS(pv::reg_gradient(d2, -0.9, 0.0), ConfigError);
  pv::Options cut;
  cut.scheme = pv::Scheme::symmetric_cutoff;
  cut.cutoff = 0.5;
  CHECK_THROWS_AS(pv::pv_gradient(d2, -0.9, cut), ConfigError);
}
