#include "loggrowth/kde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "loggrowth/error.hpp"
#include "loggrowth/quadrature.hpp"
#include "loggrowth/stats.hpp"

namespace loggrowth::kde {

namespace {

void check_order(int order) {
  if (order != 2 && order != 4) throw ConfigError("kernel order must be 2 or 4");
}

}  // namespace

double kernel(int order, double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  if (order == 2) return 15.0 / 16.0 * u * u;
  return 105.0 / 64.0 * u * u * (1.0 - 3.0 * t * t);
}

double kernel_derivative(int order, double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  if (order == 2) return -15.0 / 4.0 * t * u;
  // d/dt [u^2 (1 - 3t^2)] = -4t u (1 - 3t^2) - 6t u^2
  return 105.0 / 64.0 * (-4.0 * t * u * (1.0 - 3.0 * t * t) - 6.0 * t * u * u);
}

KdeModel KdeModel::build(std::span<const double> samples, int order, double c_h,
                         std::optional<Interval> support) {
  check_order(order);
  if (samples.size() < 2) throw ConfigError("KDE needs at least two samples");
  if (!(c_h > 0.0)) throw ConfigError("KDE bandwidth constant must be positive");
  static const bool moments_ok = [] {
    for (int s : {2, 4}) {
      for (double e : kernel_moment_defects(s)) {
        if (e > 1e-12) return false;
      }
    }
    return true;
  }();
  if (!moments_ok) throw Error("kernel moment conditions violated");
  KdeModel m;
  m.order_ = order;
  m.c_h_ = c_h;
  m.samples_.assign(samples.begin(), samples.end());
  m.sd_ = std::sqrt(stats::variance(samples));
  if (!(m.sd_ > 0.0)) throw ConfigError("KDE samples have zero spread");
  const double n = static_cast<double>(samples.size());
  m.h_ = c_h * m.sd_ * std::pow(std::log(n) / n, 1.0 / (2.0 * order + 1.0));
  if (support) {
    m.support_ = *support;
  } else {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    m.support_ = {*lo, *hi};
  }
  m.step_ = m.support_.width() / static_cast<double>(kGridNodes - 1);
  for (std::size_t i = 1; i + 1 < kGridNodes; ++i) m.nodes_.push_back(m.node(i));
  m.f_.assign(kGridNodes, 0.0);
  m.df_.assign(kGridNodes, 0.0);

  // One pass over the samples, each touching only the nodes within one bandwidth.
  const double h = m.h_;
  for (double x : m.samples_) {
    const double first = std::ceil((x - h - m.support_.lo) / m.step_);
    const double last = std::floor((x + h - m.support_.lo) / m.step_);
    const auto i0 = static_cast<std::ptrdiff_t>(std::max(first, 0.0));
    const auto i1 = static_cast<std::ptrdiff_t>(std::min(last, static_cast<double>(kGridNodes - 1)));
    for (std::ptrdiff_t i = i0; i <= i1; ++i) {
      const double t = (m.node(static_cast<std::size_t>(i)) - x) / h;
      m.f_[static_cast<std::size_t>(i)] += kernel(order, t);
      m.df_[static_cast<std::size_t>(i)] += kernel_derivative(order, t);
    }
  }
  const double s0 = 1.0 / (n * h);
  const double s1 = 1.0 / (n * h * h);
  for (std::size_t i = 0; i < kGridNodes; ++i) {
    m.f_[i] *= s0;
    m.df_[i] *= s1;
  }
  return m;
}

double KdeModel::interp(const std::vector<double>& v, double b) const {
  if (!(b >= support_.lo && b <= support_.hi)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "KDE query b = %.17g outside [%g, %g]", b, support_.lo,
                  support_.hi);
    throw DomainError(buf);
  }
  const double x = (b - support_.lo) / step_;
  const auto i = std::min(static_cast<std::size_t>(x), kGridNodes - 2);
  const double w = x - static_cast<double>(i);
  if (w == 0.0) return v[i];
  return v[i] + w * (v[i + 1] - v[i]);
}

double KdeModel::pdf(double b) const { return interp(f_, b); }

double KdeModel::dpdf(double b, Side) const { return interp(df_, b); }

double KdeModel::pdf_direct(double b) const {
  double s = 0.0;
  for (double x : samples_) s += kernel(order_, (b - x) / h_);
  return s / (static_cast<double>(samples_.size()) * h_);
}

double KdeModel::dpdf_direct(double b) const {
  double s = 0.0;
  for (double x : samples_) s += kernel_derivative(order_, (b - x) / h_);
  return s / (static_cast<double>(samples_.size()) * h_ * h_);
}

SupError sup_error(const KdeModel& m, const DensitySurface& d, Interval interval) {
  SupError e;
  for (double b : interval.grid(2001)) {
    e.nu = std::max(e.nu, std::abs(m.pdf(b) - d.pdf(b)));
    e.nu_prime = std::max(e.nu_prime, std::abs(m.dpdf(b) - d.dpdf(b)));
  }
  return e;
}

std::vector<double> kernel_moment_defects(int order) {
  check_order(order);
  std::vector<double> out;
  quad::Options q;
  q.abs_tol = 1e-15;
  for (int j = 0; j < order; ++j) {
    auto f = [&](double t) { return std::pow(t, j) * kernel(order, t); };
    const double v = quad::integrate(f, -1.0, 1.0, {}, q).value;
    out.push_back(j == 0 ? std::abs(v - 1.0) : std::abs(v));
  }
  return out;
}

}  // namespace loggrowth::kde
