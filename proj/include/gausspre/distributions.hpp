#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gausspre/rng.hpp"

namespace gausspre {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
/// f_|G|(0) for G ~ N(0,1): sqrt(2/pi).
inline constexpr double kHalfNormalDensityAtZero = 0.79788456080286535588;

// ---------------------------------------------------------------------------
// Symmetric Weibull W(theta, 1): |W| is Weibull(theta, 1) and the sign is a
// fair coin, so F(t) = 1/2 + 1/2 sgn(t) (1 - exp(-|t|^theta)).
// ---------------------------------------------------------------------------

double weibull_cdf(double theta, double t);
double weibull_pdf(double theta, double t);
double weibull_quantile(double theta, double p);

/// Half-Weibull |W|: CDF 1 - exp(-u^theta), density theta u^(theta-1) exp(-u^theta).
double half_weibull_cdf(double theta, double u);
double half_weibull_pdf(double theta, double u);

std::vector<double> weibull_sample(double theta, std::uint64_t seed,
                                   std::size_t n);

/// Value type bundling the law with its shape parameter.
struct SymmetricWeibull {
  double theta;

  explicit SymmetricWeibull(double shape);

  double cdf(double t) const { return weibull_cdf(theta, t); }
  double pdf(double t) const { return weibull_pdf(theta, t); }
  double quantile(double p) const { return weibull_quantile(theta, p); }
  /// E[W^2] = Gamma(1 + 2/theta).
  double variance() const;
  std::vector<double> sample(std::uint64_t seed, std::size_t n) const {
    return weibull_sample(theta, seed, n);
  }
};

// ---------------------------------------------------------------------------
// Standard normal and half-normal.
// ---------------------------------------------------------------------------

double std_normal_cdf(double z);
/// 1 - Phi(z) without cancellation for large z.
double std_normal_sf(double z);
double std_normal_pdf(double z);
double half_normal_cdf(double z);
double half_normal_pdf(double z);

std::vector<double> std_normal_sample(std::uint64_t seed, std::size_t n);

// ---------------------------------------------------------------------------
// Rademacher.
// ---------------------------------------------------------------------------

std::vector<double> rademacher_sample(std::uint64_t seed, std::size_t n);

// ---------------------------------------------------------------------------
// Batched fills drawing from an existing generator. These are the hot loops
// of the Monte-Carlo experiments.
// ---------------------------------------------------------------------------

void fill_weibull(Rng& rng, double theta, std::span<double> out);
void fill_std_normal(Rng& rng, std::span<double> out);
void fill_rademacher(Rng& rng, std::span<double> out);

// ---------------------------------------------------------------------------
// Sample statistics.
// ---------------------------------------------------------------------------

struct SampleMoments {
  double mean;
  double std;  // corrected, n - 1 denominator
};

/// Requires at least two samples.
SampleMoments sample_moments(std::span<const double> samples);

/// (x - mean) / std with the corrected std. Throws DomainError on fewer than
/// two samples or zero variance.
std::vector<double> standardize(std::span<const double> samples);

}  // namespace gausspre
