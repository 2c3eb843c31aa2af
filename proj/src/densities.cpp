#include "loggrowth/densities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "loggrowth/error.hpp"

namespace loggrowth {

namespace {

constexpr double kMu = 1.0;
constexpr double kSigma = 0.3;
// Points a hair outside the support (reflections computed in floating point)
// are treated as on the boundary.
constexpr double kEdgeSlack = 1e-12;

}  // namespace

NoiseDensity::NoiseDensity(std::string id, Kind kind, double lo, double hi, int smoothness,
                           std::vector<double> breakpoints)
    : id_(std::move(id)),
      kind_(kind),
      lo_(lo),
      hi_(hi),
      smoothness_(smoothness),
      breakpoints_(std::move(breakpoints)) {
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("density support must satisfy 0 < lo < hi");
  if (kind_ == Kind::trunc_normal) {
    const double z = 0.5 * (hi_ - lo_) / (kSigma * std::numbers::sqrt2);
    norm_ = kSigma * std::erf(z);
  }
}

NoiseDensity NoiseDensity::builtin(std::string_view id) {
  if (id == "D1") return {"D1", Kind::uniform, 0.5, 1.5, 1000, {}};
  if (id == "D2") return {"D2", Kind::beta22, 0.5, 1.5, 1000, {}};
  if (id == "D3") return {"D3", Kind::trunc_normal, 0.5, 1.5, 1000, {}};
  if (id == "D4") return {"D4", Kind::triangular, 0.5, 1.5, 0, {1.0}};
  throw ConfigError("unknown density id '" + std::string(id) + "' (expected D1, D2, D3 or D4)");
}

NoiseDensity NoiseDensity::uniform(double lo, double hi) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "U[%g,%g]", lo, hi);
  return {buf, Kind::uniform, lo, hi, 1000, {}};
}

double NoiseDensity::checked(double b) const {
  if (!(b >= lo_ - kEdgeSlack && b <= hi_ + kEdgeSlack)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s: b = %.17g outside support [%g, %g]", id_.c_str(), b, lo_,
                  hi_);
    throw DomainError(buf);
  }
  return std::clamp(b, lo_, hi_);
}

double NoiseDensity::pdf(double b) const {
  b = checked(b);
  const double w = hi_ - lo_;
  switch (kind_) {
    case Kind::uniform:
      return 1.0 / w;
    case Kind::beta22: {
      const double x = (b - lo_) / w;
      return 6.0 * x * (1.0 - x) / w;
    }
    case Kind::trunc_normal: {
      const double z = (b - kMu) / kSigma;
      return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * norm_);
    }
    case Kind::triangular: {
      const double half = 0.5 * w;
      const double apex = 1.0 / half;
      return apex * (1.0 - std::abs(b - 0.5 * (lo_ + hi_)) / half);
    }
  }
  return 0.0;
}

double NoiseDensity::dpdf(double b, Side side) const {
  b = checked(b);
  const double w = hi_ - lo_;
  switch (kind_) {
    case Kind::uniform:
      return 0.0;
    case Kind::beta22: {
      const double x = (b - lo_) / w;
      return 6.0 * (1.0 - 2.0 * x) / (w * w);
    }
    case Kind::trunc_normal:
      return -(b - kMu) / (kSigma * kSigma) * pdf(b);
    case Kind::triangular: {
      const double half = 0.5 * w;
      const double slope = 1.0 / (half * half);
      const double c = 0.5 * (lo_ + hi_);
      if (b < c) return slope;
      if (b > c) return -slope;
      return side == Side::left ? slope : -slope;
    }
  }
  return 0.0;
}

double NoiseDensity::draw(Rng& rng) const {
  const double w = hi_ - lo_;
  switch (kind_) {
    case Kind::uniform:
      return lo_ + w * uniform01(rng);
    case Kind::beta22: {
      // Inverse of F(x) = 3x^2 - 2x^3 via the trigonometric cubic root.
      const double u = uniform01(rng);
      const double x = 0.5 + std::cos(std::acos(1.0 - 2.0 * u) / 3.0 + 4.0 * std::numbers::pi / 3.0);
      return lo_ + w * x;
    }
    case Kind::trunc_normal:
      while (true) {
        const double b = lo_ + w * uniform01(rng);
        const double z = (b - kMu) / kSigma;
        if (uniform01(rng) < std::exp(-0.5 * z * z)) return b;
      }
    case Kind::triangular: {
      const double u = uniform01(rng);
      const double half = 0.5 * w;
      if (u < 0.5) return lo_ + half * std::sqrt(2.0 * u);
      return hi_ - half * std::sqrt(2.0 * (1.0 - u));
    }
  }
  return lo_;
}

std::vector<double> NoiseDensity::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& b : out) b = draw(rng);
  return out;
}

}  // namespace loggrowth
