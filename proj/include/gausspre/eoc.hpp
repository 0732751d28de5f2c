#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gausspre/activation.hpp"

namespace gausspre {

/// (sigma_w, sigma_b, activation) for the infinite-width recurrences.
struct EocSetting {
  double sigma_w = 1.0;
  double sigma_b = 0.0;
  Activation activation = Activation::identity();

  /// Throws DomainError unless sigma_w > 0 and sigma_b >= 0.
  void validate() const;
};

/// V(v) = sigma_w^2 E[phi(sqrt(v) Z)^2] + sigma_b^2.
double variance_map(double v, const EocSetting& setting);

/// C(c, va, vb) = (sigma_w^2 E[phi(sqrt(va) Z1) phi(sqrt(vb) Z2')] + sigma_b^2)
///                / sqrt(V(va) V(vb)),  Z2' = c Z1 + sqrt(1 - c^2) Z2.
double correlation_map(double c, double va, double vb, const EocSetting& setting);

enum class VarianceRegime {
  converged,  // finite nonzero fixed point
  collapsed,  // iterates go to 0
  diverged,   // iterates grow without bound
};

const char* to_string(VarianceRegime regime);

struct VarianceIteration {
  double v_star;
  VarianceRegime regime;
  int iterations;
};

/// Iterates V from v0 until |v_{l+1} - v_l| < 1e-10 max(1, v_l), at most
/// max_iterations times. Iterates that fall below 1e-6 count as collapse. A
/// run that exhausts the budget is converged if its last relative step is
/// below 1e-6, otherwise collapsed or diverged by the sign of that step.
VarianceIteration iterate_variance(const EocSetting& setting, double v0 = 1.0,
                                   int max_iterations = 10000);

/// C*(c) = C(c, v*, v*). v* is the attractor reached from v = 1 unless
/// given. Throws NumericError when the iteration has no nonzero limit.
double correlation_map_star(double c, const EocSetting& setting,
                            std::optional<double> v_star = std::nullopt);

struct Chi1Result {
  double chi1;
  double v_star;  // variance at which C* was differentiated
  VarianceRegime regime;
};

/// Slope of C* at c = 1 from one-sided differences with steps h, h/2, h/4
/// (h = 1e-4) combined by Richardson extrapolation. When the variance
/// iteration collapses the slope is taken at v = 1e-8 (the v -> 0 limit);
/// when it diverges, at the last iterate.
Chi1Result chi1(const EocSetting& setting,
                std::optional<double> v_star = std::nullopt);

enum class Phase { ordered, chaotic, edge };
const char* to_string(Phase phase);

/// edge if |chi1 - 1| <= tol, ordered below, chaotic above.
Phase phase_classify(const EocSetting& setting, double tol = 1e-3);

struct EocPoint {
  double sigma_b;
  double sigma_w;
  double v_star;
  double chi1;
  VarianceRegime regime;
};

struct EocWarning {
  double sigma_b;
  std::string reason;
};

struct EocCurve {
  std::vector<EocPoint> points;
  std::vector<EocWarning> warnings;
};

struct EocCurveOptions {
  double sigma_w_min = 0.05;
  double sigma_w_max = 10.0;
  double tol = 1e-3;
  std::size_t threads = 1;
};

/// Solves chi1 = 1 in sigma_w by bisection for each sigma_b. Points whose
/// variance diverges at the root, brackets without a sign change, and roots
/// with |chi1 - 1| > tol are reported as warnings instead.
EocCurve eoc_curve(const Activation& activation,
                   std::span<const double> sigma_b_grid,
                   const EocCurveOptions& options = {});

/// x exp((delta/omega) sin(omega ln|x|)), continuous extension 0 at x = 0.
double phi_delta_omega(double delta, double omega, double x);

/// sigma_omega = [(V_low + V_upp)/2]^(-1/2) with
/// V_low/upp = 2 int_0^inf z^2 exp(-/+ 2 (delta/omega) sin(omega ln z)) Dz.
double sigma_omega(double delta, double omega);

struct FixedPoint {
  double v;
  bool stable;
  double slope;  // V'(v)
};

struct FixedPointReport {
  std::vector<FixedPoint> points;
  bool degenerate_continuum = false;  // V(v) == v on the whole scan grid
  double v_min = 0.0;
  double v_max = 0.0;
};

/// Scans V(v) - v on `grid_points` log-spaced values of [v_min, v_max],
/// refines each sign change by bisection to |V(v) - v| < 1e-8 v and
/// classifies stability by a central-difference slope.
FixedPointReport find_fixed_points(const EocSetting& setting, double v_min,
                                   double v_max, std::size_t grid_points = 400);

/// ln(V(e^r) / e^r) for sigma_b = 0; periodic in r with period 4 pi / omega
/// for phi_delta_omega.
double log_variance_ratio(double r, const EocSetting& setting);

}  // namespace gausspre
