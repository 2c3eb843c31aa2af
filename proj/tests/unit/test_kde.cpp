#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "loggrowth/densities.hpp"
#include "loggrowth/error.hpp"
#include "loggrowth/kde.hpp"
#include "loggrowth/quadrature.hpp"
#include "loggrowth/stats.hpp"

using namespace loggrowth;

TEST_CASE("kernel moment conditions") {
  for (int order : {2, 4}) {
    CAPTURE(order);
    for (double d : kde::kernel_moment_defects(order)) CHECK(d <= 1e-12);
  }
  CHECK(kde::kernel(2, 1.2) == 0.0);
  for (double t = -1.0; t <= 1.0; t += 0.01) CHECK(kde::kernel(2, t) >= 0.0);
  // Derivative against finite differences of the kernel.
  for (int order : {2, 4}) {
    for (double t : {-0.7, -0.2, 0.3, 0.9}) {
      const double fd = (kde::kernel(order, t + 1e-6) - kde::kernel(order, t - 1e-6)) / 2e-6;
      CHECK(std::abs(fd - kde::kernel_derivative(order, t)) < 1e-6);
    }
  }
}

TEST_CASE("bandwidth rule and bookkeeping") {
  const auto d2 = NoiseDensity::builtin("D2");
  const auto x = d2.sample(10000, 1);
  const auto m = kde::KdeModel::build(x, 2, 1.3, d2.support());
  const double n = 10000.0;
  CHECK(m.bandwidth() == doctest::Approx(1.3 * m.sample_sd() * std::pow(std::log(n) / n, 0.2)));
  CHECK(m.n_samples() == 10000);
  CHECK(m.pdf_grid().size() == kde::kGridNodes);
  CHECK(m.breakpoints().size() == kde::kGridNodes - 2);
}

TEST_CASE("uniform recovery and vanishing derivative") {
  const auto d1 = NoiseDensity::builtin("D1");
  const auto m = kde::KdeModel::build(d1.sample(100000, 3), 2, 1.0, d1.support());
  const auto e = kde::sup_error(m, d1, Interval{0.55, 1.45});
  CHECK(e.nu <= 0.05);
  double worst = 0.0;
  for (double b : Interval{0.6, 1.4}.grid(401)) worst = std::max(worst, std::abs(m.dpdf(b)));
  CHECK(worst <= 0.5);
}

TEST_CASE("derivative noise matches the variance formula") {
  const auto d1 = NoiseDensity::builtin("D1");
  const std::size_t n = 100000;
  const auto m = kde::KdeModel::build(d1.sample(n, 3), 2, 1.0, d1.support());
  std::vector<double> v;
  for (double b : Interval{0.6, 1.4}.grid(2001)) v.push_back(m.dpdf(b));
  // Var rho-hat'(b) = rho(b) int kappa'^2 / (n h^3), int kappa'^2 = 15/7 for the biweight.
  const double h = m.bandwidth();
  const double sd = std::sqrt(15.0 / 7.0 / (static_cast<double>(n) * h * h * h));
  CHECK(std::abs(stats::mean(v)) < 0.2);
  CHECK(std::sqrt(stats::variance(v)) == doctest::Approx(sd).epsilon(0.15));
}

TEST_CASE("grid nodes agree with the direct kernel sums") {
  const auto d2 = NoiseDensity::builtin("D2");
  for (int order : {2, 4}) {
    const auto m = kde::KdeModel::build(d2.sample(20000, 4), order, 1.0, d2.support());
    for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{2048}, std::size_t{4000}, kde::kGridNodes - 1}) {
      const double b = m.node(i);
      CHECK(std::abs(m.pdf(b) - m.pdf_direct(b)) <= 1e-12);
      CHECK(std::abs(m.dpdf(b) - m.dpdf_direct(b)) <= 1e-12 * std::max(1.0, std::abs(m.dpdf_direct(b))));
    }
  }
}

TEST_CASE("estimate integrates to one over the real line") {
  const auto d2 = NoiseDensity::builtin("D2");
  for (int order : {2, 4}) {
    const auto m = kde::KdeModel::build(d2.sample(3000, 5), order, 1.0, d2.support());
    const double h = m.bandwidth();
    quad::Options q;
    q.abs_tol = 1e-11;
    auto r = quad::integrate([&](double b) { return m.pdf_direct(b); }, 0.5 - 2 * h, 1.5 + 2 * h, {}, q);
    CHECK(std::abs(r.value - 1.0) <= 1e-8);
  }
}

TEST_CASE("non-negativity and determinism") {
  const auto d3 = NoiseDensity::builtin("D3");
  const auto x = d3.sample(5000, 6);
  const auto a = kde::KdeModel::build(x, 2, 1.0, d3.support());
  const auto b = kde::KdeModel::build(x, 2, 1.0, d3.support());
  CHECK(a.pdf_grid() == b.pdf_grid());
  CHECK(a.dpdf_grid() == b.dpdf_grid());
  for (double v : a.pdf_grid()) CHECK(v >= 0.0);
}

TEST_CASE("derivative grid is consistent with the density grid") {
  const auto d2 = NoiseDensity::builtin("D2");
  const auto m = kde::KdeModel::build(d2.sample(100000, 7), 2, 1.0, d2.support());
  for (std::size_t i = 200; i < kde::kGridNodes - 200; i += 97) {
    const double b = m.node(i);
    const double fd = (m.pdf(b + 1e-4) - m.pdf(b - 1e-4)) / 2e-4;
    CHECK(std::abs(fd - m.dpdf(b)) <= 1e-3);
  }
}

TEST_CASE("sup errors shrink with the sample size") {
  const auto d2 = NoiseDensity::builtin("D2");
  const Interval inner{0.6, 1.4};
  std::vector<double> nu, nup, ns;
  for (std::size_t n : {1000ul, 10000ul, 100000ul, 1000000ul}) {
    const auto m = kde::KdeModel::build(d2.sample(n, 100 + n), 2, 1.0, d2.support());
    const auto e = kde::sup_error(m, d2, inner);
    nu.push_back(e.nu);
    nup.push_back(e.nu_prime);
    ns.push_back(static_cast<double>(n));
  }
  CHECK(nu[0] > nu[1]);
  CHECK(nu[1] > nu[2]);
  for (std::size_t i = 1; i < nu.size(); ++i) CHECK(nu[i] / nup[i] < nu[i - 1] / nup[i - 1]);
  const double s = stats::loglog_slope(ns, nu).slope;
  const double sp = stats::loglog_slope(ns, nup).slope;
  MESSAGE("slopes " << s << " " << sp);
  CHECK(s >= -0.5);
  CHECK(s <= -0.3);
  CHECK(sp >= -0.3);
  CHECK(sp <= -0.1);
}

TEST_CASE("kde error paths") {
  const std::vector<double> x = {0.9, 1.0, 1.1};
  CHECK_THROWS_AS(kde::KdeModel::build(x, 3, 1.0), ConfigError);
  CHECK_THROWS_AS(kde::KdeModel::build(std::vector<double>{}, 2, 1.0), ConfigError);
  const auto m = kde::KdeModel::build(x, 2, 1.0, Interval{0.5, 1.5});
  CHECK_THROWS_AS(m.pdf(1.6), DomainError);
  CHECK_THROWS_AS(m.dpdf(0.4), DomainError);
}
