#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "loggrowth/densities.hpp"
#include "loggrowth/interval.hpp"

namespace loggrowth::kde {

inline constexpr std::size_t kGridNodes = 4096;

/// Compactly supported kernels on [-1, 1]. Order 2 is the biweight; order 4
/// multiplies it by a quadratic that cancels the second moment.
double kernel(int order, double t);
double kernel_derivative(int order, double t);

class KdeModel final : public DensitySurface {
 public:
  /// Bandwidth h = c_h * sd(samples) * (log n / n)^(1 / (2s + 1)). The grid
  /// spans `support` (default: sample range).
  static KdeModel build(std::span<const double> samples, int order, double c_h,
                        std::optional<Interval> support = std::nullopt);

  /// Interpolated grid values. Outside the support: DomainError.
  double pdf(double b) const override;
  double dpdf(double b, Side side = Side::right) const override;
  Interval support() const override { return support_; }
  /// Interior grid nodes: the interpolant's derivative jumps there.
  std::span<const double> breakpoints() const override { return nodes_; }

  /// Exact kernel sums over the stored samples.
  double pdf_direct(double b) const;
  double dpdf_direct(double b) const;

  int order() const { return order_; }
  double bandwidth() const { return h_; }
  double c_h() const { return c_h_; }
  double sample_sd() const { return sd_; }
  std::size_t n_samples() const { return samples_.size(); }
  double node(std::size_t i) const { return support_.lo + step_ * static_cast<double>(i); }
  const std::vector<double>& pdf_grid() const { return f_; }
  const std::vector<double>& dpdf_grid() const { return df_; }

 private:
  KdeModel() = default;
  double interp(const std::vector<double>& v, double b) const;

  int order_ = 2;
  double c_h_ = 1.0;
  double h_ = 0.0;
  double sd_ = 0.0;
  Interval support_;
  double step_ = 0.0;
  std::vector<double> samples_;
  std::vector<double> nodes_;
  std::vector<double> f_;
  std::vector<double> df_;
};

struct SupError {
  double nu = 0.0;
  double nu_prime = 0.0;
};

/// Sup-norm errors of the estimate and its derivative against d on a 2001-point grid.
SupError sup_error(const KdeModel& m, const DensitySurface& d, Interval interval);

/// |int t^j kappa(t) dt| for j = 0..order-1 (j = 0 entry is |int kappa - 1|).
std::vector<double> kernel_moment_defects(int order);

}  // namespace loggrowth::kde
