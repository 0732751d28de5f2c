#include <cmath>

#include "doctest.h"
#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"
#include "gausspre/quadrature.hpp"

using namespace gausspre;

TEST_CASE("Hermite rule moments") {
  for (std::size_t order : {16, 64, 128, 200}) {
    const GaussRule rule = hermite_rule(order);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < order; ++i) {
      const double x = rule.nodes[i];
      m0 += rule.weights[i];
      m2 += rule.weights[i] * x * x;
      m4 += rule.weights[i] * x * x * x * x;
    }
    CHECK(std::abs(m0 - 1.0) <= 1e-12);
    CHECK(std::abs(m2 - 1.0) <= 1e-10);
    CHECK(std::abs(m4 - 3.0) <= 1e-9);
    for (std::size_t i = 1; i < order; ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
  }
}

TEST_CASE("gauss_expect_1d examples") {
  const GaussRule& rule = default_hermite_rule();
  CHECK(gauss_expect_1d([](double z) { return z * z; }, 1.0, rule) == doctest::Approx(1.0).epsilon(1e-12));
  // Kinked integrand: Gauss rules converge slowly, so allow 1e-4.
  CHECK(gauss_expect_1d([](double z) { return z > 0 ? z * z : 0.0; }, 1.0, rule) ==
        doctest::Approx(0.5).epsilon(1e-4));
  const double tanh2 = gauss_expect_1d([](double z) { return std::tanh(z) * std::tanh(z); }, 1.0, rule);
  CHECK(tanh2 == doctest::Approx(0.3943).epsilon(1e-4));
  CHECK(std::sqrt(tanh2) == doctest::Approx(0.628).epsilon(1e-3));
  CHECK_THROWS_AS(gauss_expect_1d([](double) { return NAN; }, 1.0, rule), NumericError);
  CHECK_THROWS_AS(gauss_expect_1d([](double z) { return z; }, -1.0, rule), DomainError);
}

TEST_CASE("Hermite order doubling converges on smooth integrands") {
  const GaussRule r64 = hermite_rule(64), r128 = hermite_rule(128);
  auto tanh2 = [](double z) { return std::tanh(z) * std::tanh(z); };
  auto sech4 = [](double z) { return std::pow(1.0 / std::cosh(z), 4); };
  // Variances met at the tanh fixed points; the poles of tanh at
  // +-i pi / (2 sqrt(v)) slow convergence for much larger v.
  for (double v : {0.1, 0.3, 1.0}) {
    CHECK(std::abs(gauss_expect_1d(tanh2, v, r64) - gauss_expect_1d(tanh2, v, r128)) <= 1e-8);
  }
  for (double v : {0.1, 0.3}) {
    CHECK(std::abs(gauss_expect_1d(sech4, v, r64) - gauss_expect_1d(sech4, v, r128)) <= 1e-8);
  }
}

TEST_CASE("log-symmetric rule integrates Gaussian moments") {
  const GaussRule& rule = default_log_rule();
  CHECK(gauss_expect_1d([](double z) { return z * z; }, 1.0, rule) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(gauss_expect_1d([](double z) { return std::abs(z); }, 1.0, rule) ==
        doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-10));
}

TEST_CASE("gauss_expect_2d examples") {
  const BivariateRule& rule = default_bivariate_rule();
  auto xy = [](double x, double y) { return x * y; };
  for (double rho : {-0.9, -0.3, 0.0, 0.5, 1.0}) {
    CHECK(gauss_expect_2d(xy, 1.0, 1.0, rho, rule) == doctest::Approx(rho).epsilon(1e-12));
  }
  CHECK(gauss_expect_2d(xy, 4.0, 1.0, 0.5, rule) == doctest::Approx(1.0).epsilon(1e-12));
  auto f = [](double x, double y) { return std::tanh(x) * std::sin(y) + x * x * y * y; };
  const double at_one = gauss_expect_2d(f, 2.0, 0.5, 1.0, rule);
  const double one_d = gauss_expect_1d(
      [&](double z) { return f(std::sqrt(2.0) * z, std::sqrt(0.5) * z); }, 1.0, default_hermite_rule());
  CHECK(at_one == doctest::Approx(one_d).epsilon(1e-9));
  // Separable integrand factorizes at c = 0.
  auto g = [](double x, double y) { return std::tanh(x) * std::tanh(x) * std::cos(y); };
  const double prod = gauss_expect_1d([](double z) { return std::tanh(z) * std::tanh(z); }, 1.5, default_hermite_rule()) *
                      gauss_expect_1d([](double z) { return std::cos(z); }, 0.7, default_hermite_rule());
  CHECK(std::abs(gauss_expect_2d(g, 1.5, 0.7, 0.0, rule) - prod) <= 1e-9);
  // ReLU arc-cosine kernel, exact in closed form.
  auto relu2 = [](double x, double y) { return std::max(x, 0.0) * std::max(y, 0.0); };
  for (double c : {-0.5, 0.2, 0.9, 0.9999}) {
    const double exact = (std::sqrt(1 - c * c) + (kPi - std::acos(c)) * c) / (2 * kPi);
    CHECK(gauss_expect_2d(relu2, 1.0, 1.0, c, rule) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gauss_expect_2d(xy, 1.0, 1.0, 1.01, rule), DomainError);
}

TEST_CASE("cdf_from_density") {
  std::vector<double> grid, density;
  for (int i = 0; i <= 2000; ++i) {
    grid.push_back(i * 0.01);
    density.push_back(std::exp(-grid.back()));
  }
  const auto cdf = cdf_from_density(grid, density);
  CHECK(std::abs(cdf[100] - (1.0 - std::exp(-1.0))) <= 1e-4);
  const std::vector<double> zeros(grid.size(), 0.0);
  for (double c : cdf_from_density(grid, zeros)) CHECK(c == 0.0);
  CHECK_THROWS_AS(cdf_from_density(std::vector<double>{1.0}, std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(cdf_from_density(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, -1e-6}),
                  DomainError);
}

TEST_CASE("product_cdf") {
  const double theta = 3.0;
  // |W| |Y| with |Y| ~ Exp(1) is some proper law; check limits and monotonicity.
  auto g = [](double t) { return std::exp(-t); };
  CHECK(product_cdf(theta, g, 0.0) == 0.0);
  CHECK(product_cdf(theta, g, 8.0, {1e-10, 40.0, 2000}) >= 0.999);
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double value = product_cdf(theta, g, i * 0.05);
    CHECK(value >= prev);
    prev = value;
  }
}
