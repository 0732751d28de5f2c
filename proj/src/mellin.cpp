#include "gausspre/mellin.hpp"

#define BOOST_MATH_DISABLE_FLOAT128
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "gausspre/error.hpp"

namespace gausspre {

namespace {

constexpr double kBlowUp = 1e6;

template <class Real>
Real log_ratio(int n, double theta) {
  using boost::math::lgamma;
  using std::log;
  const Real s = n;
  const Real half = Real(1) / 2;
  const Real pi = boost::math::constants::pi<Real>();
  return (s - 1) * half * log(Real(2)) + lgamma(s * half) - half * log(pi) -
         lgamma((s - 1) / Real(theta) + 1);
}

template <class Real>
LaguerreSeries compute_series(double theta, std::size_t K, Precision precision) {
  using std::abs;
  using std::exp;
  using std::log;
  LaguerreSeries series;
  series.theta = theta;
  series.precision = precision;
  series.coefficients.reserve(K);
  series.term_magnitude.reserve(K);

  // log Gamma(m) for m = 1..K and log f(n) - n log 2 - log Gamma(n).
  std::vector<Real> log_gamma(K + 1), log_weight(K + 1);
  const Real log2 = log(Real(2));
  for (std::size_t m = 1; m <= K; ++m) {
    log_gamma[m] = boost::math::lgamma(Real(static_cast<double>(m)));
  }
  for (std::size_t n = 1; n <= K; ++n) {
    log_weight[n] = log_ratio<Real>(static_cast<int>(n), theta) -
                    Real(static_cast<double>(n)) * log2 - log_gamma[n];
  }
  const double unit_roundoff = 0.5 * static_cast<double>(std::numeric_limits<Real>::epsilon());

  for (std::size_t k = 1; k <= K; ++k) {
    Real sum = 0, magnitude = 0;
    for (std::size_t n = 1; n <= k; ++n) {
      // C(k-1, n-1) = Gamma(k) / (Gamma(n) Gamma(k-n+1))
      const Real log_term = log_gamma[k] - log_gamma[n] - log_gamma[k - n + 1] + log_weight[n];
      const Real term = exp(log_term);
      magnitude += term;
      if (n % 2 == 1) {
        sum += term;
      } else {
        sum -= term;
      }
    }
    const double c = static_cast<double>(sum);
    const double mag = static_cast<double>(magnitude);
    series.coefficients.push_back(c);
    series.term_magnitude.push_back(mag);
    if (!series.divergence_index &&
        (!std::isfinite(c) || std::abs(c) > kBlowUp ||
         static_cast<double>(k) * unit_roundoff * mag >= std::abs(c))) {
      series.divergence_index = k;
    }
  }
  return series;
}

}  // namespace

double mellin_half_normal(double s) {
  if (!(s > 0.0)) throw DomainError("mellin_half_normal: s must be > 0");
  return std::exp(0.5 * (s - 1.0) * std::log(2.0) + std::lgamma(0.5 * s) -
                  0.5 * std::log(3.14159265358979323846));
}

double mellin_half_weibull(double s, double theta) {
  if (!(theta > 0.0)) throw DomainError("mellin_half_weibull: theta must be > 0");
  const double arg = (s - 1.0) / theta + 1.0;
  if (!(arg > 0.0)) {
    throw DomainError("mellin_half_weibull: (s - 1)/theta + 1 must be > 0");
  }
  return std::tgamma(arg);
}

double log_target_ratio(double s, double theta) {
  if (!(s > 0.0)) throw DomainError("target_ratio: s must be > 0");
  if (!(theta > 0.0)) throw DomainError("target_ratio: theta must be > 0");
  const double arg = (s - 1.0) / theta + 1.0;
  if (!(arg > 0.0)) throw DomainError("target_ratio: (s - 1)/theta + 1 must be > 0");
  return 0.5 * (s - 1.0) * std::log(2.0) + std::lgamma(0.5 * s) -
         0.5 * std::log(3.14159265358979323846) - std::lgamma(arg);
}

double target_ratio(double s, double theta) {
  return std::exp(log_target_ratio(s, theta));
}

const char* to_string(Precision precision) {
  return precision == Precision::float64 ? "float64" : "extended";
}

std::size_t LaguerreSeries::usable_terms() const {
  return divergence_index ? *divergence_index - 1 : coefficients.size();
}

LaguerreSeries laguerre_coefficients(double theta, std::size_t K, Precision precision) {
  if (K < 1) throw DomainError("laguerre_coefficients: K must be >= 1");
  if (!(theta > 0.0)) throw DomainError("laguerre_coefficients: theta must be > 0");
  if (precision == Precision::float64) return compute_series<double>(theta, K, precision);
  return compute_series<boost::multiprecision::cpp_bin_float_quad>(theta, K, precision);
}

double laguerre_inverse_eval(const LaguerreSeries& series, double z, std::size_t max_terms) {
  if (!(z >= 0.0)) throw DomainError("laguerre_inverse_eval: z must be >= 0");
  std::size_t n = series.usable_terms();
  if (max_terms > 0) n = std::min(n, max_terms);
  if (n == 0) return 0.0;
  const double x = 0.5 * z;
  double l_prev = 1.0, l_curr = 1.0 - x;
  double total = series.coefficients[0];
  if (n > 1) total += series.coefficients[1] * l_curr;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double l_next = ((2.0 * k + 1.0 - x) * l_curr - k * l_prev) / (k + 1.0);
    l_prev = l_curr;
    l_curr = l_next;
    total += series.coefficients[k + 1] * l_curr;
  }
  return std::exp(-x) * total;
}

}  // namespace gausspre
