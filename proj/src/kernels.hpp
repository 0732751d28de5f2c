#pragma once

// Vectorizable inner loops. kernels.cpp is compiled with -ffast-math so that
// glibc's SIMD log/exp/sin/cos are used; every caller passes finite inputs.

#include <cstddef>

namespace gausspre::kernels {

/// In place: uniform (0,1) -> symmetric Weibull(theta) by inverse CDF.
void weibull_from_uniform(double* u, std::size_t n, double inv_theta);

/// Box–Muller on consecutive pairs: (u1, u2) -> (z1, z2). n must be even.
void normal_from_uniform_pairs(double* u, std::size_t n);

/// g(t_i) for the two-term density family, given log t_i:
///   gamma alpha t^(alpha-1) / l1^alpha exp(-(t/l1)^alpha)
///   + g0 exp(-(t/l2)^theta_prime)
void density_family(const double* log_t, std::size_t n, double alpha,
                    double gamma, double log_l1, double log_l2,
                    double theta_prime, double g0, double* out);

/// sum a_i b_i (vectorized, so the summation order is not left to right).
double dot(const double* a, const double* b, std::size_t n);

}  // namespace gausspre::kernels
