#include <cmath>
#include <vector>

#include "doctest.h"
#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"
#include "gausspre/kstest.hpp"

using namespace gausspre;

TEST_CASE("KS statistic") {
  const std::vector<double> normal = std_normal_sample(3, 1000000);
  CHECK(ks_statistic(normal, std_normal_cdf) <= 0.002);

  const std::vector<double> one{0.0};
  CHECK(ks_statistic(one, std_normal_cdf) == doctest::Approx(0.5).epsilon(1e-15));

  std::vector<double> narrow = std_normal_sample(4, 100000);
  for (double& x : narrow) x *= 0.628;
  CHECK(ks_statistic(narrow, std_normal_cdf) > 0.05);

  const std::vector<double> bad{1.0, NAN};
  CHECK_THROWS_AS(ks_statistic(bad, std_normal_cdf), DomainError);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, std_normal_cdf), DomainError);

  // Exact value for a tiny sample.
  const std::vector<double> three{-1.0, 0.0, 2.0};
  const double expected = std::max({1.0 / 3 - std_normal_cdf(-1.0), std_normal_cdf(-1.0),
                                    2.0 / 3 - 0.5, 0.5 - 1.0 / 3, 1.0 - std_normal_cdf(2.0),
                                    std_normal_cdf(2.0) - 2.0 / 3});
  CHECK(ks_statistic(three, std_normal_cdf) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("KS statistic is invariant under increasing relabeling") {
  const std::vector<double> x = std_normal_sample(9, 50);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]) + std::pow(x[i], 3);
  auto cdf_y = [](double v) {
    double lo = -20.0, hi = 20.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (std::exp(mid) + std::pow(mid, 3) < v ? lo : hi) = mid;
    }
    return std_normal_cdf(0.5 * (lo + hi));
  };
  CHECK(ks_statistic(y, cdf_y) == doctest::Approx(ks_statistic(x, std_normal_cdf)).epsilon(1e-12));
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_quantile(0.05) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(kolmogorov_quantile(0.5) == doctest::Approx(0.8276).epsilon(1e-4));
  CHECK(kolmogorov_quantile(0.01) > kolmogorov_quantile(0.05));
  CHECK(kolmogorov_cdf(0.0) == 0.0);
  CHECK(kolmogorov_cdf(0.19) == doctest::Approx(kolmogorov_cdf(0.2)).epsilon(0.05));
  double prev = 0.0;
  for (int i = 1; i <= 300; ++i) {
    const double f = kolmogorov_cdf(0.01 * i);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK_THROWS_AS(kolmogorov_quantile(0.0), DomainError);
}

TEST_CASE("KS thresholds and decisions") {
  CHECK(ks_threshold(10000000, 0.05) == doctest::Approx(4.29e-4).epsilon(2e-3));
  CHECK(ks_threshold(10000, 0.05) == doctest::Approx(0.01358).epsilon(1e-3));
  CHECK(ks_threshold(18000, 0.05) == doctest::Approx(0.0101).epsilon(1e-2));
  CHECK_THROWS_AS(ks_threshold(0), DomainError);

  const std::vector<double> x = std_normal_sample(1, 10000);
  const KsResult r = ks_test_normal(x);
  CHECK(r.reject == (r.statistic > r.threshold));
  CHECK(r.sample_size == 10000);
  CHECK(r.alpha == 0.05);

  std::vector<double> shifted = x;
  for (double& v : shifted) v = 3.0 * v + 5.0;
  CHECK(ks_test_normal(shifted).reject);
  CHECK(ks_test_standardized(shifted).statistic ==
        doctest::Approx(ks_test_standardized(x).statistic).epsilon(1e-9));
}

TEST_CASE("KS null rejection rate") {
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    rejections += ks_test_normal(std_normal_sample(1000 + seed, 2000)).reject ? 1 : 0;
  }
  const double rate = rejections / 200.0;
  CHECK(rate >= 0.01);
  CHECK(rate <= 0.12);
}
