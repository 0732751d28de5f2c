#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "gausspre/activation_table.hpp"
#include "gausspre/quadrature.hpp"

namespace gausspre {

/// theta' with 1/theta + 1/theta' = 1/2. Throws DomainError for theta <= 2.
double theta_conjugate(double theta);

/// sqrt(2/pi) / Gamma(1 - 1/theta): the value every g_Lambda takes at 0.
double density_at_zero(double theta);

/// Lambda = (alpha, gamma, lambda1, lambda2) with the shape theta:
///   g(x) = gamma alpha x^(alpha-1) / lambda1^alpha exp(-(x/lambda1)^alpha)
///        + g(0) exp(-(x/lambda2)^theta').
/// theta_prime is the conjugate of theta except while it is being annealed.
struct DensityModel {
  double theta = 3.0;
  double alpha = 3.0;
  double gamma = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double theta_prime = 6.0;

  /// Model with theta_prime = theta_conjugate(theta). Throws DomainError
  /// unless theta > 2 and all four parameters are > 0.
  static DensityModel make(double theta, double alpha, double gamma,
                           double lambda1, double lambda2);
  void validate() const;
};

double g_lambda(const DensityModel& model, double x);

struct FitGrid {
  double z_max = 5.0;
  std::size_t z_points = 200;
  ProductCdfConfig t{};  // truncation T = t.t_max, g renormalized on [t_min, T]
};

/// Precomputed pieces of the loss for one theta: the z grid, F_|G| on it,
/// and the kernel w_i F_|W|(z_j / t_i) of the product-CDF integral.
class FitProblem {
 public:
  FitProblem(double theta, const FitGrid& grid = {});

  double theta() const { return theta_; }
  std::span<const double> z() const { return z_; }
  std::span<const double> target() const { return target_; }

  struct Evaluation {
    double loss;
    std::size_t argmax;  // largest z index attaining the max
    double signed_error;  // Fhat - F_|G| at argmax
  };

  /// ||Fhat_Lambda - F_|G|||_inf over the z grid.
  Evaluation evaluate(const DensityModel& model) const;
  /// Fhat_Lambda(z_j) for every grid point.
  std::vector<double> fitted_cdf(const DensityModel& model) const;
  /// Fhat_Lambda at a single grid index.
  double fitted_cdf_at(const DensityModel& model, std::size_t j) const;

 private:
  void density_on_grid(const DensityModel& model, std::vector<double>& out) const;

  double theta_;
  LogGrid t_grid_;
  std::vector<double> z_;
  std::vector<double> target_;
  std::vector<double> kernel_;  // row-major, z_points x t_points
  mutable std::vector<double> scratch_;
};

double fit_loss(const DensityModel& model, const FitGrid& grid = {});

struct FitConfig {
  std::size_t epochs = 100;
  std::size_t steps_per_epoch = 1000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double fd_step = 1e-4;            // central differences on log-parameters
  std::size_t anneal_epochs = 50;   // theta' ramps from 2; optimizer reset after
  double plateau_threshold = 0.01;  // relative improvement that resets patience
  std::size_t plateau_patience = 20;
  std::size_t plateau_cooldown = 20;
  double plateau_factor = 0.46415888336127786;  // 10^(-1/3)
  double init_alpha = 3.0;
  double init_gamma = 1.0;
  double init_lambda1 = 1.0;
  double init_lambda2 = 1.0;
  /// Standard deviation of a seeded log-normal perturbation of the initial
  /// parameters; 0 starts exactly from the init values.
  double init_jitter = 0.0;
  FitGrid grid{};
};

struct FitTraceRow {
  std::size_t epoch;
  double loss;
  double learning_rate;
  double theta_prime;
};

struct FitResult {
  DensityModel model;  // best parameters at the true theta'
  double loss;
  std::vector<FitTraceRow> trace;
};

/// Adam on log(Lambda) against the L-infinity CDF loss, using the
/// subgradient at the argmax grid point. Throws NumericError when the loss
/// becomes non-finite.
FitResult fit(double theta, const FitConfig& config = {}, std::uint64_t seed = 0);

/// Law of |Y| for a density model, truncated to [0, y_max] and renormalized.
/// The CDF is evaluated in closed form (Weibull term plus a regularized
/// incomplete gamma), so both tails keep full relative precision.
class AbsYDistribution {
 public:
  explicit AbsYDistribution(const DensityModel& model, double y_max = 12.0);

  double density(double y) const;
  double cdf(double y) const;
  double survival(double y) const;
  /// y with P(|Y| <= y) = p, given both p and q = 1 - p so neither tail
  /// loses precision. Throws DomainError unless 0 <= p, q <= 1.
  double quantile(double p, double q) const;

  double y_max() const { return y_max_; }
  /// Untruncated mass of g on [0, y_max].
  double total_mass() const { return mass_; }

 private:
  double raw_cdf(double y) const;
  double raw_tail(double y) const;  // mass on [y, y_max]

  DensityModel model_;
  double y_max_;
  double g0_;
  double second_scale_;  // g0 lambda2 Gamma(1 + 1/theta')
  double mass_;
};

struct BuildConfig {
  double z_max = 8.0;
  double fine_step = 0.005;
  double fine_limit = 2.0;
  double coarse_step = 0.02;
  double y_max = 12.0;
};

/// phi_theta(z) = F_Y^{-1}(F_G(z)) tabulated on [-z_max, z_max], odd by
/// construction. Throws DomainError when the tabulated CDF is not monotone.
ActivationTable build_activation(const DensityModel& model, double fit_loss,
                                 const BuildConfig& config = {});

/// The theta values with published tables: 2.05, 2.5, 3, 4, 5, 7, 10.
std::span<const double> shipped_thetas();

/// phi_theta from `cache_dir`/phi_theta_<theta>.csv when present, otherwise
/// fitted with the default FitConfig, built and (if cache_dir is non-empty)
/// saved there. The fit is deterministic, so cached and fresh tables agree.
std::shared_ptr<const ActivationTable> shipped_activation(
    double theta, const std::filesystem::path& cache_dir = {});

}  // namespace gausspre
