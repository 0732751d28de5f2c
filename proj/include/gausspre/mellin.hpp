#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace gausspre {

/// (M f_|G|)(s) = 2^((s-1)/2) Gamma(s/2) / sqrt(pi), s > 0.
double mellin_half_normal(double s);

/// (M f_|W|)(s) = Gamma((s-1)/theta + 1), requires (s-1)/theta + 1 > 0.
double mellin_half_weibull(double s, double theta);

/// (M f_|G|)(s) / (M f_|W|)(s), evaluated as a difference of log-gammas.
double target_ratio(double s, double theta);
double log_target_ratio(double s, double theta);

enum class Precision { float64, extended };

const char* to_string(Precision precision);

/// Coefficients of the Laguerre expansion of the inverse Mellin transform of
/// target_ratio(., theta):
///   c_k = sum_{n=1}^{k} C(k-1, n-1) (-1)^(n-1) f(n) / (2^n Gamma(n)).
struct LaguerreSeries {
  double theta = 0.0;
  Precision precision = Precision::float64;
  std::vector<double> coefficients;     // c_1 .. c_K
  std::vector<double> term_magnitude;   // sum_n |term_n| for each k
  /// First k (1-based) with |c_k| > 1e6, or whose alternating sum has lost
  /// every significant digit: k u sum|terms| >= |c_k|, u the unit roundoff.
  std::optional<std::size_t> divergence_index;

  /// Number of leading coefficients usable for reconstruction.
  std::size_t usable_terms() const;
};

LaguerreSeries laguerre_coefficients(double theta, std::size_t K,
                                     Precision precision = Precision::float64);

/// e^(-z/2) sum_{k=0}^{N-1} c_{k+1} L_k(z/2) with N = min(max_terms,
/// usable_terms()); max_terms = 0 means no extra cap.
double laguerre_inverse_eval(const LaguerreSeries& series, double z,
                             std::size_t max_terms = 0);

}  // namespace gausspre
