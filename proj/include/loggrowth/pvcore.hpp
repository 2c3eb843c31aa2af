#pragma once

#include <cstddef>

#include "loggrowth/densities.hpp"
#include "loggrowth/interval.hpp"

namespace loggrowth::pv {

inline double b_sing(double K) { return -1.0 / K; }

/// How the integral across the pole b_sing is evaluated.
enum class Scheme {
  parity_shell,      // far region + odd-part subtraction on a symmetric shell
  symmetric_cutoff,  // drop (b_sing - h, b_sing + h)
  naive_adaptive,    // adaptive quadrature over the support with the pole withheld
};

struct Options {
  Scheme scheme = Scheme::parity_shell;
  double cutoff = 1e-3;              // symmetric_cutoff only
  double shell_fraction = 0.5;       // shell radius as a fraction of the pole margin
  double abs_tol = 1e-12;
  std::size_t max_subdivisions = 20000;
  bool register_breakpoints = true;  // pass density kinks to the integrator
  bool throw_on_failure = true;      // false: return the achieved value
};

/// Options that mimic an off-the-shelf adaptive integrator given no pole information.
Options naive_options();

struct HessianParts {
  double boundary_term = 0.0;
  double integral_term = 0.0;
  double total = 0.0;
};

struct LocalConstants {
  double mu0 = 0.0;        // min of the finite-part Hessian over the basin
  double L0 = 0.0;         // max of the same
  double mu0_joint = 0.0;  // min over the basin and eps in {0, eps0/2, eps0}
  double L0_joint = 0.0;
  double tau = 0.0;        // pole-to-edge margin at K*
  double tau_basin = 0.0;  // smallest margin over the basin
  double delta = 0.0;
  double cbar_b = 0.0;     // sup over the basin grid of pi rho(b_sing)/|K|
  double hessian_at_Kstar = 0.0;
  double Kstar = 0.0;
  Interval basin;
};

inline constexpr double kEps0 = 0.05;
inline constexpr std::size_t kBasinGrid = 41;

/// Distance from the pole to the nearest support endpoint (negative when outside).
double pole_margin(const DensitySurface& d, double K);

double cost_J(const DensitySurface& d, double K);
double reg_cost(const DensitySurface& d, double K, double eps);

/// dJ/dK as a Cauchy principal value when the pole is interior.
double pv_gradient(const DensitySurface& d, double K, const Options& opts = {});
double reg_gradient(const DensitySurface& d, double K, double eps);

HessianParts hessian_decomposition(const DensitySurface& d, double K, double eps,
                                   const Options& opts = {});

double find_Kstar(const DensitySurface& d);
double find_Kstar_eps(const DensitySurface& d, double eps, Interval basin);

LocalConstants local_constants(const DensitySurface& d, double Kstar, double delta);

/// Largest delta in {0.05, 0.06, ..., 0.20} whose basin keeps the pole at least
/// 0.05 from both endpoints.
double widest_delta(const DensitySurface& d, double Kstar);

/// Integral of |b rho(b) / (1 + bK)| with (b_sing - w, b_sing + w) removed.
double shell_excluded_abs_integral(const DensitySurface& d, double K, double w);

}  // namespace loggrowth::pv
