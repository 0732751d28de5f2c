#include "gausspre/distributions.hpp"

#include <cmath>
#include <string>

#include "gausspre/error.hpp"
#include "kernels.hpp"

namespace gausspre {

namespace {

void require_shape(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("Weibull shape must be finite and > 0, got " +
                      std::to_string(theta));
  }
}

void require_finite(double t, const char* what) {
  if (!std::isfinite(t)) {
    throw DomainError(std::string(what) + ": argument must be finite");
  }
}

}  // namespace

double weibull_cdf(double theta, double t) {
  require_shape(theta);
  require_finite(t, "weibull_cdf");
  if (t == 0.0) return 0.5;
  const double tail = 0.5 * std::exp(-std::pow(std::abs(t), theta));
  return t > 0.0 ? 1.0 - tail : tail;
}

double weibull_pdf(double theta, double t) {
  require_shape(theta);
  require_finite(t, "weibull_pdf");
  const double a = std::abs(t);
  if (a == 0.0) {
    if (theta > 1.0) return 0.0;
    return theta == 1.0 ? 0.5 : INFINITY;
  }
  return 0.5 * theta * std::pow(a, theta - 1.0) * std::exp(-std::pow(a, theta));
}

double weibull_quantile(double theta, double p) {
  require_shape(theta);
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("weibull_quantile: p must lie in (0, 1), got " +
                      std::to_string(p));
  }
  const double d = p - 0.5;
  if (d == 0.0) return 0.0;
  // 1 - 2|p - 1/2| is the two-sided tail mass; for p > 1/2 evaluate it as
  // 2(1 - p) so that p close to 1 keeps its precision.
  const double tail = d > 0.0 ? 2.0 * (1.0 - p) : 2.0 * p;
  const double magnitude = std::pow(-std::log(tail), 1.0 / theta);
  return d > 0.0 ? magnitude : -magnitude;
}

double half_weibull_cdf(double theta, double u) {
  require_shape(theta);
  if (u <= 0.0) return 0.0;
  return -std::expm1(-std::pow(u, theta));
}

double half_weibull_pdf(double theta, double u) {
  require_shape(theta);
  if (u < 0.0) return 0.0;
  if (u == 0.0) return theta > 1.0 ? 0.0 : (theta == 1.0 ? 1.0 : INFINITY);
  return theta * std::pow(u, theta - 1.0) * std::exp(-std::pow(u, theta));
}

SymmetricWeibull::SymmetricWeibull(double shape) : theta(shape) {
  require_shape(shape);
}

double SymmetricWeibull::variance() const {
  return std::tgamma(1.0 + 2.0 / theta);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double std_normal_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double half_normal_cdf(double z) {
  return z <= 0.0 ? 0.0 : std::erf(z / kSqrt2);
}

double half_normal_pdf(double z) {
  return z < 0.0 ? 0.0 : 2.0 * std_normal_pdf(z);
}

void fill_weibull(Rng& rng, double theta, std::span<double> out) {
  require_shape(theta);
  for (double& x : out) x = rng.uniform_open();
  kernels::weibull_from_uniform(out.data(), out.size(), 1.0 / theta);
}

void fill_std_normal(Rng& rng, std::span<double> out) {
  const std::size_t even = out.size() & ~std::size_t{1};
  for (double& x : out) x = rng.uniform_open();
  kernels::normal_from_uniform_pairs(out.data(), even);
  if (even != out.size()) {
    // Odd tail: one more Box–Muller pair, keep the cosine branch.
    double pair[2] = {out.back(), rng.uniform_open()};
    kernels::normal_from_uniform_pairs(pair, 2);
    out.back() = pair[0];
  }
}

void fill_rademacher(Rng& rng, std::span<double> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = rng.bits();
    for (int b = 0; b < 64 && i < out.size(); ++b, ++i, word >>= 1) {
      out[i] = (word & 1U) ? 1.0 : -1.0;
    }
  }
}

std::vector<double> weibull_sample(double theta, std::uint64_t seed,
                                   std::size_t n) {
  std::vector<double> out(n);
  Rng rng(seed);
  fill_weibull(rng, theta, out);
  return out;
}

std::vector<double> std_normal_sample(std::uint64_t seed, std::size_t n) {
  std::vector<double> out(n);
  Rng rng(seed);
  fill_std_normal(rng, out);
  return out;
}

std::vector<double> rademacher_sample(std::uint64_t seed, std::size_t n) {
  std::vector<double> out(n);
  Rng rng(seed);
  fill_rademacher(rng, out);
  return out;
}

SampleMoments sample_moments(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw DomainError("sample_moments: need at least two samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

std::vector<double> standardize(std::span<const double> samples) {
  const auto [mean, sd] = sample_moments(samples);
  if (!(sd > 0.0)) throw DomainError("standardize: zero sample variance");
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] = (samples[i] - mean) / sd;
  }
  return out;
}

}  // namespace gausspre
