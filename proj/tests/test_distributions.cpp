#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"
#include "gausspre/quadrature.hpp"

using namespace gausspre;

namespace {

double ks_against(std::vector<double> xs, double (*cdf)(double, double), double theta) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(theta, xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace

TEST_CASE("weibull_cdf values and symmetry") {
  CHECK(weibull_cdf(2.0, 0.0) == 0.5);
  CHECK(weibull_cdf(2.0, 1.0) == doctest::Approx(1.0 - 0.5 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(weibull_cdf(2.0, 1.0) == doctest::Approx(0.81606).epsilon(1e-5));
  CHECK(weibull_cdf(3.0, -1.0) == doctest::Approx(0.18394).epsilon(1e-4));
  for (double t : {0.1, 0.7, 1.5, 3.0}) {
    CHECK(weibull_cdf(2.5, -t) == doctest::Approx(1.0 - weibull_cdf(2.5, t)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(weibull_cdf(2.0, NAN), DomainError);
  CHECK_THROWS_AS(weibull_cdf(2.0, INFINITY), DomainError);
  CHECK_THROWS_AS(weibull_cdf(0.0, 1.0), DomainError);
}

TEST_CASE("weibull density: zero at origin for theta > 1, integrates to one") {
  CHECK(weibull_pdf(2.05, 0.0) == 0.0);
  CHECK(weibull_pdf(3.0, 0.0) == 0.0);
  for (double theta : {2.05, 3.0, 10.0}) {
    const LegendreRule rule = legendre_rule(200);
    double total = 0.0;
    // Integrate over [-6, 6] split at 0 where the density has its kink.
    for (double sign : {-1.0, 1.0}) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = sign * 3.0 * (rule.nodes[i] + 1.0);
        total += 3.0 * rule.weights[i] * weibull_pdf(theta, t);
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("weibull_quantile closed form") {
  CHECK(weibull_quantile(2.0, 0.5) == 0.0);
  CHECK(weibull_quantile(2.0, 1.0 - 0.5 * std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(weibull_quantile(2.0, 0.81606) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(weibull_quantile(10.0, 0.95) == doctest::Approx(std::pow(-std::log(0.1), 0.1)).epsilon(1e-12));
  CHECK(weibull_quantile(10.0, 0.95) == doctest::Approx(1.0870).epsilon(1e-4));
  CHECK_THROWS_AS(weibull_quantile(2.0, 0.0), DomainError);
  CHECK_THROWS_AS(weibull_quantile(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(weibull_quantile(2.0, -0.3), DomainError);
}

TEST_CASE("quantile and CDF round trips") {
  for (double theta : {2.05, 3.0, 10.0, 0.5}) {
    for (int i = 1; i < 1000; ++i) {
      const double p = i / 1000.0;
      CHECK(std::abs(weibull_cdf(theta, weibull_quantile(theta, p)) - p) <= 1e-12);
    }
    for (double t = -5.0; t <= 5.0; t += 0.01) {
      const double back = weibull_quantile(theta, std::clamp(weibull_cdf(theta, t), 1e-300, 1.0 - 1e-16));
      const double density = weibull_pdf(theta, t);
      // 1e-12 where the inverse is well conditioned; elsewhere the bound
      // is a few ulps of p divided by the density.
      const double bound = std::max(1e-12, 4.0 * std::numeric_limits<double>::epsilon() / density);
      if (density > 1e-300) CHECK(std::abs(back - t) <= bound);
    }
  }
}

TEST_CASE("half-Weibull reciprocal moment equals Gamma(1 - 1/theta)") {
  const LogGrid grid = make_log_grid({1e-12, 40.0, 20000});
  for (double theta : {2.05, 3.0, 5.0, 10.0}) {
    double total = 0.0;
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
      total += grid.weights[i] * half_weibull_pdf(theta, grid.t[i]) / grid.t[i];
    }
    CHECK(total == doctest::Approx(std::tgamma(1.0 - 1.0 / theta)).epsilon(1e-6));
  }
}

TEST_CASE("half-Weibull tail is exactly GWT(theta)") {
  for (double t : {0.5, 1.0, 1.5}) {
    CHECK(-std::log(1.0 - half_weibull_cdf(3.0, t)) == doctest::Approx(t * t * t).epsilon(1e-10));
  }
}

TEST_CASE("weibull_sample distribution checks") {
  const auto xs = weibull_sample(2.0, 42, 1000000);
  CHECK(ks_against(xs, weibull_cdf, 2.0) <= 0.002);
  const auto ys = weibull_sample(10.0, 43, 1000000);
  double mean = 0.0, positive = 0.0;
  for (double y : ys) {
    mean += y;
    positive += y > 0.0;
  }
  CHECK(std::abs(mean / ys.size()) <= 0.01);
  CHECK(std::abs(positive / ys.size() - 0.5) <= 0.005);
  CHECK(weibull_sample(3.0, 7, 100) == weibull_sample(3.0, 7, 100));
  CHECK(weibull_sample(3.0, 7, 100) != weibull_sample(3.0, 8, 100));
  const SymmetricWeibull law(2.5);
  CHECK(law.sample(5, 10) == weibull_sample(2.5, 5, 10));
  CHECK(law.variance() == doctest::Approx(std::tgamma(1.8)));
}

TEST_CASE("rademacher_sample") {
  const auto xs = rademacher_sample(11, 1000000);
  double mean = 0.0;
  bool only_signs = true;
  for (double x : xs) {
    mean += x;
    only_signs = only_signs && (x == 1.0 || x == -1.0);
  }
  CHECK(only_signs);
  CHECK(std::abs(mean / xs.size()) <= 0.005);
  CHECK(rademacher_sample(3, 1) == rademacher_sample(3, 1));
}

TEST_CASE("standard normal") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
  CHECK(std_normal_cdf(-8.0) == doctest::Approx(6.220960574271785e-16).epsilon(1e-13));
  CHECK(std_normal_sf(8.0) == doctest::Approx(6.220960574271785e-16).epsilon(1e-13));
  CHECK(half_normal_pdf(0.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-15));
  CHECK(kHalfNormalDensityAtZero == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-16));
  double prev = 0.0;
  for (double z = -8.0; z <= 8.0; z += 0.01) {
    CHECK(std_normal_cdf(z) >= prev);
    prev = std_normal_cdf(z);
  }
  const auto xs = std_normal_sample(9, 1000001);
  const SampleMoments m = sample_moments(xs);
  CHECK(std::abs(m.std - 1.0) <= 0.005);
  CHECK(std::abs(m.mean) <= 0.005);
}

TEST_CASE("standardize") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto z = standardize(x);
  CHECK(z[0] == doctest::Approx(-1.0));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.0));
  const auto zz = standardize(z);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(zz[i] - z[i]) <= 1e-12);
  CHECK_THROWS_AS(standardize(std::vector<double>{5.0, 5.0, 5.0}), DomainError);
  CHECK_THROWS_AS(standardize(std::vector<double>{5.0}), DomainError);
}
