#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loggrowth/interval.hpp"
#include "loggrowth/rng.hpp"

namespace loggrowth {

/// Which one-sided derivative to return at a breakpoint.
enum class Side { left, right };

/// Anything that exposes a density and its derivative on a compact support.
/// Both the exact noise densities and KDE estimates implement this, so the
/// population oracle and the pairing estimators work with either.
class DensitySurface {
 public:
  virtual ~DensitySurface() = default;
  virtual double pdf(double b) const = 0;
  virtual double dpdf(double b, Side side = Side::right) const = 0;
  virtual Interval support() const = 0;
  /// Interior points where the derivative jumps.
  virtual std::span<const double> breakpoints() const { return {}; }
};

class NoiseDensity final : public DensitySurface {
 public:
  enum class Kind { uniform, beta22, trunc_normal, triangular };

  /// D1 uniform, D2 rescaled Beta(2,2), D3 truncated N(1, 0.3^2), D4 triangle; all on [0.5, 1.5].
  static NoiseDensity builtin(std::string_view id);
  static NoiseDensity uniform(double lo, double hi);
  static std::vector<std::string> builtin_ids() { return {"D1", "D2", "D3", "D4"}; }

  double pdf(double b) const override;
  double dpdf(double b, Side side = Side::right) const override;
  Interval support() const override { return {lo_, hi_}; }
  std::span<const double> breakpoints() const override { return breakpoints_; }

  const std::string& id() const { return id_; }
  Kind kind() const { return kind_; }
  int smoothness() const { return smoothness_; }

  double draw(Rng& rng) const;
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

 private:
  NoiseDensity(std::string id, Kind kind, double lo, double hi, int smoothness,
               std::vector<double> breakpoints);
  double checked(double b) const;

  std::string id_;
  Kind kind_;
  double lo_;
  double hi_;
  int smoothness_;
  std::vector<double> breakpoints_;
  double norm_ = 1.0;  // truncated-normal normalizer
};

}  // namespace loggrowth
