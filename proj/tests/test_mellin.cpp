#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"
#include "gausspre/mellin.hpp"
#include "gausspre/quadrature.hpp"

using namespace gausspre;

TEST_CASE("closed-form Mellin transforms") {
  CHECK(mellin_half_normal(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mellin_half_normal(3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mellin_half_normal(2.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(mellin_half_normal(0.0), DomainError);
  for (double theta : {2.05, 3.0, 7.0}) {
    CHECK(mellin_half_weibull(1.0, theta) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mellin_half_weibull(theta + 1.0, theta) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(target_ratio(1.0, theta) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(mellin_half_weibull(3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(mellin_half_weibull(-2.0, 2.0), DomainError);
  CHECK(target_ratio(3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(target_ratio(2.0, 4.0) == doctest::Approx(std::sqrt(2.0 / kPi) / std::tgamma(1.25)).epsilon(1e-14));
}

TEST_CASE("half-Weibull Mellin transform matches quadrature") {
  const LogGrid grid = make_log_grid({1e-14, 30.0, 20000});
  for (double theta : {2.05, 3.0, 5.0}) {
    for (double s : {1.0, 1.5, 2.0, 3.0}) {
      double total = 0.0;
      for (std::size_t i = 0; i < grid.t.size(); ++i) {
        total += grid.weights[i] * std::pow(grid.t[i], s - 1.0) * half_weibull_pdf(theta, grid.t[i]);
      }
      CHECK(std::abs(total - mellin_half_weibull(s, theta)) <= 1e-6);
    }
  }
}

TEST_CASE("Laguerre coefficients: first term and instability") {
  for (double theta : {2.05, 3.0, 10.0}) {
    CHECK(laguerre_coefficients(theta, 1).coefficients[0] == doctest::Approx(0.5).epsilon(1e-15));
  }
  const LaguerreSeries series = laguerre_coefficients(2.05, 500);
  REQUIRE(series.coefficients.size() == 500);
  REQUIRE(series.divergence_index.has_value());
  CHECK(*series.divergence_index <= 500);
  for (std::size_t k = 0; k + 1 < *series.divergence_index; ++k) {
    CHECK(std::isfinite(series.coefficients[k]));
  }

  // Sign changes become rarer as k grows (increasing wavelength).
  const LaguerreSeries ext = laguerre_coefficients(2.05, 300, Precision::extended);
  std::vector<std::size_t> changes;
  for (std::size_t k = 1; k < ext.usable_terms(); ++k) {
    if ((ext.coefficients[k] < 0.0) != (ext.coefficients[k - 1] < 0.0)) changes.push_back(k);
  }
  REQUIRE(changes.size() >= 4);
  CHECK(changes[3] - changes[2] > changes[1] - changes[0]);
  CHECK(changes.back() - changes[changes.size() - 2] > changes[1] - changes[0]);

  // Extended precision keeps more digits and diverges later if at all.
  const std::size_t ext_usable = ext.usable_terms();
  CHECK(ext_usable >= std::min<std::size_t>(300, series.usable_terms()));
  for (std::size_t k = 0; k < 100; ++k) {
    CHECK(std::abs(ext.coefficients[k] - series.coefficients[k]) <= 1e-7);
  }
}

TEST_CASE("Laguerre reconstruction") {
  const LaguerreSeries series = laguerre_coefficients(2.05, 300);
  const std::size_t n = series.usable_terms();
  double at_zero = 0.0;
  for (std::size_t k = 0; k < n; ++k) at_zero += series.coefficients[k];
  CHECK(laguerre_inverse_eval(series, 0.0) == doctest::Approx(at_zero).epsilon(1e-12));
  CHECK(std::abs(laguerre_inverse_eval(series, 40.0)) < 0.1);
  CHECK(std::abs(laguerre_inverse_eval(series, 60.0)) < 0.1);
  double lowest = 1.0;
  for (int i = 0; i <= 500; ++i) lowest = std::min(lowest, laguerre_inverse_eval(series, i * 0.01));
  CHECK(lowest < 0.0);
  CHECK_THROWS_AS(laguerre_inverse_eval(series, -1.0), DomainError);
}
