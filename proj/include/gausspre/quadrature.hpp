#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gausspre {

/// Nodes and weights approximating E[f(Z)], Z ~ N(0,1): the weights already
/// include the Gaussian density, so sum(weights) == 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const { return nodes.size(); }
};

/// Probabilists' Gauss–Hermite rule with `order` nodes (Newton iteration on
/// the orthonormal Hermite recurrence).
GaussRule hermite_rule(std::size_t order);

/// Symmetric rule built from a trapezoid in u = ln|z|, nodes ±exp(u). Meant
/// for integrands that oscillate in ln|z| near the origin, where Hermite
/// rules converge slowly.
GaussRule log_symmetric_rule(double u_min = -30.0, double u_max = 3.8,
                             std::size_t points = 1700);

/// Gauss–Legendre nodes/weights on [-1, 1].
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
LegendreRule legendre_rule(std::size_t order);

/// Gauss–Laguerre nodes/weights for the weight exp(-x) on [0, inf).
struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
LaguerreRule laguerre_rule(std::size_t order);

/// Cached default rules (built once, immutable, safe to share across threads).
const GaussRule& default_hermite_rule();  // order 128
const GaussRule& default_log_rule();

/// E[f(sqrt(v) Z)], Z ~ N(0,1). Throws NumericError when f is not finite at
/// a node, DomainError when v < 0.
double gauss_expect_1d(const std::function<double(double)>& f, double v,
                       const GaussRule& rule);

/// Rule for E[f(sqrt(va) Z1, sqrt(vb) Z2')] with Z2' = c Z1 + sqrt(1-c^2) Z2.
/// Integrates in polar coordinates (Z1, Z2) = r (cos t, sin t): radially with
/// Gauss–Laguerre in r^2/2 (or a log-radius trapezoid) and angularly with
/// Gauss–Legendre on arcs split where either argument changes sign, so
/// integrands with a kink at 0 (ReLU) are integrated to full accuracy.
struct BivariateRule {
  std::vector<double> radii;
  std::vector<double> radial_weights;  // sum to 1: law of the Rayleigh radius
  LegendreRule arc;

  static BivariateRule laguerre(std::size_t radial = 64, std::size_t arc = 48);
  static BivariateRule log_radial(double u_min = -30.0, double u_max = 2.5,
                                  std::size_t radial = 900,
                                  std::size_t arc = 48);
};

const BivariateRule& default_bivariate_rule();
const BivariateRule& default_log_bivariate_rule();

/// Throws DomainError when |c| > 1 or a variance is negative.
double gauss_expect_2d(const std::function<double(double, double)>& f,
                       double va, double vb, double c,
                       const BivariateRule& rule);

/// Cumulative trapezoid of a tabulated density. Output has the grid's length,
/// starts at 0 and ends at the total mass; it is clamped to be nondecreasing.
/// Throws DomainError on a grid shorter than 2 points, a non-increasing grid
/// or density entries below -1e-9.
std::vector<double> cdf_from_density(std::span<const double> grid,
                                     std::span<const double> density);

/// Half-line grid for the product integral F(z) = int F_|W|(z/t) g(t) dt.
/// Trapezoid in s = ln t over [ln t_min, ln t_max]; g is truncated at t_max.
struct ProductCdfConfig {
  double t_min = 1e-10;
  double t_max = 12.0;
  std::size_t points = 900;
};

struct LogGrid {
  std::vector<double> log_t;
  std::vector<double> t;
  std::vector<double> weights;  // trapezoid weight in s times dt/ds = t
};
LogGrid make_log_grid(const ProductCdfConfig& config);

/// P(|W| |Y| <= z) with |W| half-Weibull(theta) and |Y| of density g, by the
/// product-convolution CDF integral. g is used as given (not renormalized).
double product_cdf(double theta, const std::function<double(double)>& g,
                   double z, const ProductCdfConfig& config = {});

}  // namespace gausspre
