#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace gausspre {

/// sup |F_s - F| for the empirical CDF F_s of the samples. Throws DomainError
/// on an empty or non-finite sample.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf);

/// Same, for samples already sorted ascending.
double ks_statistic_sorted(std::span<const double> sorted,
                           const std::function<double(double)>& cdf);

/// P(K <= x) = 1 - 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 x^2).
double kolmogorov_cdf(double x);

/// K_alpha with P(K <= K_alpha) = 1 - alpha. Throws DomainError unless
/// 0 < alpha < 1.
double kolmogorov_quantile(double alpha);

/// K_alpha / sqrt(s). Throws DomainError when s == 0.
double ks_threshold(std::size_t s, double alpha = 0.05);

struct KsResult {
  double statistic;
  std::size_t sample_size;
  double threshold;
  double alpha;
  bool reject;  // statistic > threshold
};

KsResult ks_test(std::span<const double> samples,
                 const std::function<double(double)>& cdf, double alpha = 0.05);

/// KS test of the samples against N(0, 1).
KsResult ks_test_normal(std::span<const double> samples, double alpha = 0.05);

/// KS test of the standardized samples (x - mean) / std against N(0, 1).
KsResult ks_test_standardized(std::span<const double> samples, double alpha = 0.05);

}  // namespace gausspre
