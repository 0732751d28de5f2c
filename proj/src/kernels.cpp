#include "kernels.hpp"

#include <cmath>

namespace gausspre::kernels {

void weibull_from_uniform(double* u, std::size_t n, double inv_theta) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * u[i] - 1.0;
    const double m = a < 0.0 ? -a : a;
    const double w = std::exp(std::log(-std::log(1.0 - m)) * inv_theta);
    u[i] = a < 0.0 ? -w : w;
  }
}

void normal_from_uniform_pairs(double* u, std::size_t n) {
  constexpr double kTwoPi = 6.283185307179586477;
  const std::size_t pairs = n / 2;
#pragma omp simd
  for (std::size_t i = 0; i < pairs; ++i) {
    const double r = std::sqrt(-2.0 * std::log(u[2 * i]));
    const double angle = kTwoPi * u[2 * i + 1];
    u[2 * i] = r * std::cos(angle);
    u[2 * i + 1] = r * std::cos(angle - 0.25 * kTwoPi);  // sin(angle)
  }
}

void density_family(const double* log_t, std::size_t n, double alpha,
                    double gamma, double log_l1, double log_l2,
                    double theta_prime, double g0, double* out) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = std::exp(alpha * (log_t[i] - log_l1));  // (t/l1)^alpha
    const double t = std::exp(log_t[i]);
    const double weibull_part = gamma * alpha * scaled / t * std::exp(-scaled);
    const double tail = g0 * std::exp(-std::exp(theta_prime * (log_t[i] - log_l2)));
    out[i] = weibull_part + tail;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace gausspre::kernels
