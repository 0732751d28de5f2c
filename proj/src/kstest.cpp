#include "gausspre/kstest.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"

namespace gausspre {

double ks_statistic_sorted(std::span<const double> sorted,
                           const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw DomainError("ks_statistic: empty sample");
  const double s = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!std::isfinite(sorted[i])) throw DomainError("ks_statistic: non-finite sample");
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / s - f, f - static_cast<double>(i) / s});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf) {
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!std::isfinite(x)) throw DomainError("ks_statistic: non-finite sample");
  }
  std::sort(sorted.begin(), sorted.end());
  return ks_statistic_sorted(sorted, cdf);
}

double kolmogorov_cdf(double x) {
  if (!(x > 0.0)) return 0.0;
  if (x < 0.2) {
    // Dual series sqrt(2 pi)/x sum exp(-(2j-1)^2 pi^2 / (8 x^2)); the
    // alternating form converges too slowly here.
    double total = 0.0;
    for (int j = 1; j < 100; ++j) {
      const double k = 2.0 * j - 1.0;
      const double term = std::exp(-k * k * kPi * kPi / (8.0 * x * x));
      total += term;
      if (term < 1e-300) break;
    }
    return std::sqrt(2.0 * kPi) / x * total;
  }
  double total = 0.0;
  for (int j = 1; j < 1000; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    total += (j % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(1.0 - 2.0 * total, 0.0, 1.0);
}

double kolmogorov_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("kolmogorov_quantile: alpha must lie in (0, 1)");
  }
  const double target = 1.0 - alpha;
  double lo = 0.0, hi = 1.0;
  while (kolmogorov_cdf(hi) < target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_threshold(std::size_t s, double alpha) {
  if (s == 0) throw DomainError("ks_threshold: sample size must be >= 1");
  return kolmogorov_quantile(alpha) / std::sqrt(static_cast<double>(s));
}

KsResult ks_test(std::span<const double> samples,
                 const std::function<double(double)>& cdf, double alpha) {
  const double d = ks_statistic(samples, cdf);
  const double threshold = ks_threshold(samples.size(), alpha);
  return {d, samples.size(), threshold, alpha, d > threshold};
}

KsResult ks_test_normal(std::span<const double> samples, double alpha) {
  return ks_test(samples, std_normal_cdf, alpha);
}

KsResult ks_test_standardized(std::span<const double> samples, double alpha) {
  const std::vector<double> z = standardize(samples);
  return ks_test(z, std_normal_cdf, alpha);
}

}  // namespace gausspre
