#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace loggrowth {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr double width() const { return hi - lo; }
  constexpr double mid() const { return 0.5 * (lo + hi); }
  constexpr bool contains(double x) const { return x >= lo && x <= hi; }
  constexpr bool contains_open(double x) const { return x > lo && x < hi; }
  constexpr double clamp(double x) const { return std::clamp(x, lo, hi); }

  /// n >= 2 equally spaced points including both ends.
  std::vector<double> grid(std::size_t n) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = (i + 1 == n) ? hi : lo + width() * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
  }
};

}  // namespace loggrowth
