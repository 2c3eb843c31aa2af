#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace loggrowth::stats {

/// Pairwise summation; error grows like log(n) instead of n.
double pairwise_sum(std::span<const double> x);

double mean(std::span<const double> x);

/// Unbiased sample variance (n - 1 denominator). Requires n >= 2.
double variance(std::span<const double> x);

/// Standard error of the mean.
double std_error(std::span<const double> x);

/// Linear-interpolation quantile (type 7). Copies and sorts.
double quantile(std::span<const double> x, double p);

double median(std::span<const double> x);

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// OLS fit of y on x.
Fit ols(std::span<const double> x, std::span<const double> y);

/// OLS on log10(x), log10(y), restricted to x in [x_lo, x_hi].
/// Non-positive values are skipped.
Fit loglog_slope(std::span<const double> x, std::span<const double> y, double x_lo, double x_hi);

/// Same as above over all points.
Fit loglog_slope(std::span<const double> x, std::span<const double> y);

/// n points log-spaced from a to b inclusive.
std::vector<double> logspace(double a, double b, std::size_t n);

}  // namespace loggrowth::stats
