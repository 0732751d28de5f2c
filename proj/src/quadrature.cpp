#include "gausspre/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"

namespace gausspre {

namespace {

constexpr int kMaxNewton = 200;

bool converged(double z, double z_prev) {
  return std::abs(z - z_prev) <= 1e-15 * std::max(1.0, std::abs(z));
}

}  // namespace

GaussRule hermite_rule(std::size_t order) {
  if (order == 0) throw DomainError("hermite_rule: order must be >= 1");
  const int n = static_cast<int>(order);
  // Golub–Welsch eigenvalues of the Jacobi matrix (probabilists' scaling)
  // seed Newton on the orthonormal physicists' recurrence, which then gives
  // full-precision nodes and weights.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd guesses = solver.eigenvalues();  // ascending

  std::vector<double> x(order), w(order);
  const double pi_m4 = 0.7511255444649425;  // pi^(-1/4)
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = guesses[n - 1 - i] / kSqrt2;
    double derivative = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = pi_m4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      derivative = std::sqrt(2.0 * n) * p2;
      const double z_prev = z;
      z = z_prev - p1 / derivative;
      if (converged(z, z_prev)) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (derivative * derivative);
  }
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double inv_sqrt_pi = 0.56418958354775628695;
  // Ascending order, rescaled to the standard normal weight.
  for (std::size_t i = 0; i < order; ++i) {
    rule.nodes[i] = kSqrt2 * x[order - 1 - i];
    rule.weights[i] = w[order - 1 - i] * inv_sqrt_pi;
  }
  return rule;
}

GaussRule log_symmetric_rule(double u_min, double u_max, std::size_t points) {
  if (points < 2 || !(u_max > u_min)) {
    throw DomainError("log_symmetric_rule: need points >= 2 and u_max > u_min");
  }
  const double du = (u_max - u_min) / static_cast<double>(points - 1);
  GaussRule rule;
  rule.nodes.reserve(2 * points);
  rule.weights.reserve(2 * points);
  for (std::size_t i = 0; i < points; ++i) {
    const double u = u_min + du * static_cast<double>(i);
    const double z = std::exp(u);
    const double end = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
    const double w = end * du * z * std_normal_pdf(z);
    rule.nodes.push_back(-z);
    rule.weights.push_back(w);
    rule.nodes.push_back(z);
    rule.weights.push_back(w);
  }
  return rule;
}

LegendreRule legendre_rule(std::size_t order) {
  if (order == 0) throw DomainError("legendre_rule: order must be >= 1");
  const int n = static_cast<int>(order);
  LegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      derivative = n * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / derivative;
      if (converged(z, z_prev)) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] =
        2.0 / ((1.0 - z * z) * derivative * derivative);
  }
  return rule;
}

LaguerreRule laguerre_rule(std::size_t order) {
  if (order == 0) throw DomainError("laguerre_rule: order must be >= 1");
  const int n = static_cast<int>(order);
  LaguerreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - rule.nodes[i - 2]);
    }
    double p2 = 0.0, derivative = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1);
      }
      derivative = (n * p1 - n * p2) / z;
      const double z_prev = z;
      z = z_prev - p1 / derivative;
      if (converged(z, z_prev)) break;
    }
    rule.nodes[i] = z;
    rule.weights[i] = -1.0 / (derivative * n * p2);
  }
  return rule;
}

const GaussRule& default_hermite_rule() {
  static const GaussRule rule = hermite_rule(128);
  return rule;
}

const GaussRule& default_log_rule() {
  static const GaussRule rule = log_symmetric_rule();
  return rule;
}

double gauss_expect_1d(const std::function<double(double)>& f, double v,
                       const GaussRule& rule) {
  if (!(v >= 0.0)) throw DomainError("gauss_expect_1d: variance must be >= 0");
  const double scale = std::sqrt(v);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double value = f(scale * rule.nodes[i]);
    if (!std::isfinite(value)) {
      throw NumericError("gauss_expect_1d: integrand not finite at node " +
                         std::to_string(scale * rule.nodes[i]));
    }
    sum += rule.weights[i] * value;
  }
  return sum;
}

BivariateRule BivariateRule::laguerre(std::size_t radial, std::size_t arc) {
  const LaguerreRule lag = laguerre_rule(radial);
  BivariateRule rule;
  rule.radii.reserve(radial);
  rule.radial_weights.reserve(radial);
  // With u = r^2/2 the Rayleigh law r exp(-r^2/2) dr becomes exp(-u) du.
  for (std::size_t i = 0; i < radial; ++i) {
    rule.radii.push_back(std::sqrt(2.0 * lag.nodes[i]));
    rule.radial_weights.push_back(lag.weights[i]);
  }
  rule.arc = legendre_rule(arc);
  return rule;
}

BivariateRule BivariateRule::log_radial(double u_min, double u_max,
                                        std::size_t radial, std::size_t arc) {
  if (radial < 2 || !(u_max > u_min)) {
    throw DomainError("BivariateRule::log_radial: bad radial grid");
  }
  BivariateRule rule;
  const double du = (u_max - u_min) / static_cast<double>(radial - 1);
  for (std::size_t i = 0; i < radial; ++i) {
    const double u = u_min + du * static_cast<double>(i);
    const double r = std::exp(u);
    const double end = (i == 0 || i + 1 == radial) ? 0.5 : 1.0;
    rule.radii.push_back(r);
    rule.radial_weights.push_back(end * du * r * r * std::exp(-0.5 * r * r));
  }
  rule.arc = legendre_rule(arc);
  return rule;
}

const BivariateRule& default_bivariate_rule() {
  static const BivariateRule rule = BivariateRule::laguerre();
  return rule;
}

const BivariateRule& default_log_bivariate_rule() {
  static const BivariateRule rule = BivariateRule::log_radial();
  return rule;
}

double gauss_expect_2d(const std::function<double(double, double)>& f,
                       double va, double vb, double c,
                       const BivariateRule& rule) {
  if (!(std::abs(c) <= 1.0)) {
    throw DomainError("gauss_expect_2d: correlation must lie in [-1, 1]");
  }
  if (!(va >= 0.0 && vb >= 0.0)) {
    throw DomainError("gauss_expect_2d: variances must be >= 0");
  }
  constexpr double kTwoPi = 2.0 * kPi;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  // Z2' = c Z1 + s Z2 = r cos(t - beta) for (Z1, Z2) = r (cos t, sin t).
  const double beta = std::atan2(s, c);
  std::array<double, 5> cuts = {0.5 * kPi, 1.5 * kPi,
                                std::fmod(beta + 0.5 * kPi, kTwoPi),
                                std::fmod(beta + 1.5 * kPi, kTwoPi), 0.0};
  std::sort(cuts.begin(), cuts.begin() + 4);
  cuts[4] = cuts[0] + kTwoPi;

  const double sa = std::sqrt(va), sb = std::sqrt(vb);
  double total = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (hi - lo < 1e-14) continue;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t j = 0; j < rule.arc.nodes.size(); ++j) {
      const double t = mid + half * rule.arc.nodes[j];
      const double ca = std::cos(t), cb = std::cos(t - beta);
      double radial_sum = 0.0;
      for (std::size_t i = 0; i < rule.radii.size(); ++i) {
        const double r = rule.radii[i];
        const double value = f(sa * r * ca, sb * r * cb);
        if (!std::isfinite(value)) {
          throw NumericError("gauss_expect_2d: integrand not finite");
        }
        radial_sum += rule.radial_weights[i] * value;
      }
      total += half * rule.arc.weights[j] * radial_sum;
    }
  }
  return total / kTwoPi;
}

std::vector<double> cdf_from_density(std::span<const double> grid,
                                     std::span<const double> density) {
  if (grid.size() < 2) throw DomainError("cdf_from_density: grid needs >= 2 points");
  if (density.size() != grid.size()) {
    throw DomainError("cdf_from_density: grid/density length mismatch");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (density[i] < -1e-9 || !std::isfinite(density[i])) {
      throw DomainError("cdf_from_density: negative or non-finite density at index " +
                        std::to_string(i));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError("cdf_from_density: grid must be strictly increasing");
    }
  }
  std::vector<double> cdf(grid.size());
  cdf[0] = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = std::max(0.0, density[i - 1]);
    const double b = std::max(0.0, density[i]);
    cdf[i] = cdf[i - 1] + 0.5 * (a + b) * (grid[i] - grid[i - 1]);
  }
  return cdf;
}

LogGrid make_log_grid(const ProductCdfConfig& config) {
  if (config.points < 2 || !(config.t_min > 0.0) || !(config.t_max > config.t_min)) {
    throw DomainError("product integral grid: need 0 < t_min < t_max, points >= 2");
  }
  LogGrid grid;
  const double s0 = std::log(config.t_min), s1 = std::log(config.t_max);
  const double ds = (s1 - s0) / static_cast<double>(config.points - 1);
  for (std::size_t i = 0; i < config.points; ++i) {
    const double s = s0 + ds * static_cast<double>(i);
    const double t = std::exp(s);
    const double end = (i == 0 || i + 1 == config.points) ? 0.5 : 1.0;
    grid.log_t.push_back(s);
    grid.t.push_back(t);
    grid.weights.push_back(end * ds * t);
  }
  return grid;
}

double product_cdf(double theta, const std::function<double(double)>& g,
                   double z, const ProductCdfConfig& config) {
  if (!(theta > 0.0)) throw DomainError("product_cdf: theta must be > 0");
  if (!(z > 0.0)) return 0.0;
  const LogGrid grid = make_log_grid(config);
  const double log_z = std::log(z);
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.t.size(); ++i) {
    const double ratio_pow = std::exp(theta * (log_z - grid.log_t[i]));
    sum += grid.weights[i] * -std::expm1(-ratio_pow) * g(grid.t[i]);
  }
  return sum;
}

}  // namespace gausspre
