#include "loggrowth/stats.hpp"

#include <algorithm>
#include <cmath>

#include "loggrowth/error.hpp"

namespace loggrowth::stats {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 64) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = x.size() / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

double mean(std::span<const double> x) {
  if (x.empty()) throw ConfigError("mean of empty sequence");
  return pairwise_sum(x) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw ConfigError("variance needs at least two values");
  const double m = mean(x);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - m;
    sq[i] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

double std_error(std::span<const double> x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double quantile(std::span<const double> x, double p) {
  if (x.empty()) throw ConfigError("quantile of empty sequence");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

Fit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("ols needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("ols: degenerate abscissae");
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  return f;
}

Fit loglog_slope(std::span<const double> x, std::span<const double> y, double x_lo, double x_hi) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] < x_lo || x[i] > x_hi || x[i] <= 0.0 || y[i] <= 0.0) continue;
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
  }
  return ols(lx, ly);
}

Fit loglog_slope(std::span<const double> x, std::span<const double> y) {
  return loglog_slope(x, y, 0.0, INFINITY);
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  const double la = std::log10(a);
  const double lb = std::log10(b);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = std::pow(10.0, la + t * (lb - la));
  }
  if (n > 0) {
    out.front() = a;
    out.back() = b;
  }
  return out;
}

}  // namespace loggrowth::stats
