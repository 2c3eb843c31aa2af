#pragma once

// Global adaptive Gauss-Kronrod (G10/K21) integration with user break-points.
//
// Break-points split [a, b] into initial segments so that jump discontinuities,
// kinks and integrable endpoint singularities never sit inside a segment. The
// error heuristics follow QUADPACK's qk21/qag. When the tolerance cannot be met
// the best estimate is still returned with converged == false; callers decide
// whether that is fatal.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <tuple>
#include <span>
#include <vector>

namespace loggrowth::quad {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  std::size_t max_subdivisions = 20000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  std::size_t segments = 0;
  bool converged = false;
  bool roundoff_limited = false;  // error sits at the floating-point floor
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double floor;  // roundoff part of the error estimate
  bool refinable;
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<double, 10> fv1{};
  std::array<double, 10> fv2{};
  const double fc = f(center);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double resabs = std::abs(resk);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (std::size_t j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  const double value = resk * half;
  resabs *= abs_half;
  resasc *= abs_half;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double floor = eps * 50.0 * resabs;
  if (resabs > uflow / (50.0 * eps)) err = std::max(floor, err);
  if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
  // Segments narrower than a few hundred ulps cannot be bisected meaningfully.
  const double scale = std::max(std::abs(a), std::abs(b));
  const bool refinable = std::abs(b - a) > 1000.0 * eps * std::max(scale, uflow);
  return {a, b, value, err, floor, refinable};
}

}  // namespace detail

/// Integrate f over [a, b]. Break-points outside (a, b) are ignored.
template <class F>
Result integrate(F&& f, double a, double b, std::span<const double> breakpoints = {},
                 const Options& opts = {}) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Max-heap on the error estimate; frozen holds segments too small to split.
  std::vector<detail::Segment> work;
  std::vector<detail::Segment> frozen;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    work.push_back(detail::gk21(f, cuts[i], cuts[i + 1]));
    out.evaluations += 21;
  }
  std::make_heap(work.begin(), work.end(), detail::ByError{});

  auto totals = [&]() {
    double v = 0.0;
    double e = 0.0;
    double fl = 0.0;
    for (const auto* list : {&work, &frozen}) {
      for (const auto& s : *list) {
        v += s.value;
        e += s.error;
        fl += s.floor;
      }
    }
    return std::tuple{v, e, fl};
  };

  double value = 0.0;
  double error = 0.0;
  double floor = 0.0;
  {
    auto [v, e, fl] = totals();
    value = v;
    error = e;
    floor = fl;
  }

  std::size_t segments = cuts.size() - 1;
  while (true) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (error <= 2.0 * floor) {
      out.converged = true;
      out.roundoff_limited = true;
      break;
    }
    if (work.empty() || segments >= opts.max_subdivisions) break;
    std::pop_heap(work.begin(), work.end(), detail::ByError{});
    detail::Segment worst = work.back();
    work.pop_back();
    if (!worst.refinable) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Segment left = detail::gk21(f, worst.a, mid);
    detail::Segment right = detail::gk21(f, mid, worst.b);
    out.evaluations += 42;
    ++segments;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    floor += left.floor + right.floor - worst.floor;
    work.push_back(left);
    std::push_heap(work.begin(), work.end(), detail::ByError{});
    work.push_back(right);
    std::push_heap(work.begin(), work.end(), detail::ByError{});
    if (segments % 64 == 0) {
      auto [v, e, fl] = totals();  // resum to stop drift in the running totals
      value = v;
      error = e;
      floor = fl;
    }
  }
  auto [v, e, fl] = totals();
  out.value = sign * v;
  out.abs_error = e;
  out.segments = segments;
  if (!std::isfinite(v)) out.converged = false;
  return out;
}

}  // namespace loggrowth::quad
