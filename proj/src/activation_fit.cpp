#include "gausspre/activation_fit.hpp"

#define BOOST_MATH_DISABLE_FLOAT128
#include <array>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>

#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"
#include "gausspre/rng.hpp"
#include "kernels.hpp"

namespace gausspre {

double theta_conjugate(double theta) {
  if (!(theta > 2.0) || !std::isfinite(theta)) {
    throw DomainError("theta must be a finite value > 2");
  }
  return 1.0 / (0.5 - 1.0 / theta);
}

double density_at_zero(double theta) {
  if (!(theta > 1.0)) throw DomainError("density_at_zero: theta must be > 1");
  return kHalfNormalDensityAtZero / std::tgamma(1.0 - 1.0 / theta);
}

DensityModel DensityModel::make(double theta, double alpha, double gamma,
                                double lambda1, double lambda2) {
  DensityModel m{theta, alpha, gamma, lambda1, lambda2, theta_conjugate(theta)};
  m.validate();
  return m;
}

void DensityModel::validate() const {
  theta_conjugate(theta);
  for (double p : {alpha, gamma, lambda1, lambda2, theta_prime}) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw DomainError("density model parameters must be finite and > 0");
    }
  }
}

double g_lambda(const DensityModel& m, double x) {
  if (x < 0.0) throw DomainError("g_lambda: x must be >= 0");
  const double g0 = density_at_zero(m.theta);
  const double second = g0 * std::exp(-std::pow(x / m.lambda2, m.theta_prime));
  if (x == 0.0) {
    if (m.alpha < 1.0) return std::numeric_limits<double>::infinity();
    return (m.alpha == 1.0 ? m.gamma / m.lambda1 : 0.0) + second;
  }
  const double r = x / m.lambda1;
  return m.gamma * m.alpha / m.lambda1 * std::pow(r, m.alpha - 1.0) *
             std::exp(-std::pow(r, m.alpha)) +
         second;
}

FitProblem::FitProblem(double theta, const FitGrid& grid) : theta_(theta) {
  theta_conjugate(theta);
  if (grid.z_points < 2 || !(grid.z_max > 0.0)) {
    throw DomainError("fit grid needs z_max > 0 and at least two points");
  }
  t_grid_ = make_log_grid(grid.t);
  const std::size_t nz = grid.z_points, nt = t_grid_.t.size();
  z_.resize(nz);
  target_.resize(nz);
  kernel_.resize(nz * nt);
  for (std::size_t j = 0; j < nz; ++j) {
    z_[j] = grid.z_max * static_cast<double>(j) / static_cast<double>(nz - 1);
    target_[j] = half_normal_cdf(z_[j]);
    for (std::size_t i = 0; i < nt; ++i) {
      kernel_[j * nt + i] = t_grid_.weights[i] * half_weibull_cdf(theta, z_[j] / t_grid_.t[i]);
    }
  }
  scratch_.resize(nt);
}

void FitProblem::density_on_grid(const DensityModel& m, std::vector<double>& out) const {
  out.resize(t_grid_.t.size());
  kernels::density_family(t_grid_.log_t.data(), out.size(), m.alpha, m.gamma,
                          std::log(m.lambda1), std::log(m.lambda2), m.theta_prime,
                          density_at_zero(m.theta), out.data());
}

namespace {

double normalizer(std::span<const double> g, std::span<const double> w) {
  return kernels::dot(g.data(), w.data(), g.size());
}

double row_dot(const double* k, const double* g, std::size_t n) {
  return kernels::dot(k, g, n);
}

}  // namespace

std::vector<double> FitProblem::fitted_cdf(const DensityModel& m) const {
  density_on_grid(m, scratch_);
  const double mass = normalizer(scratch_, t_grid_.weights);
  const std::size_t nt = scratch_.size();
  std::vector<double> out(z_.size());
  for (std::size_t j = 0; j < z_.size(); ++j) {
    out[j] = row_dot(&kernel_[j * nt], scratch_.data(), nt) / mass;
  }
  return out;
}

double FitProblem::fitted_cdf_at(const DensityModel& m, std::size_t j) const {
  density_on_grid(m, scratch_);
  const double mass = normalizer(scratch_, t_grid_.weights);
  return row_dot(&kernel_[j * scratch_.size()], scratch_.data(), scratch_.size()) / mass;
}

FitProblem::Evaluation FitProblem::evaluate(const DensityModel& m) const {
  const std::vector<double> fhat = fitted_cdf(m);
  Evaluation e{-1.0, 0, 0.0};
  for (std::size_t j = 0; j < fhat.size(); ++j) {
    const double d = fhat[j] - target_[j];
    if (!std::isfinite(d)) return {std::numeric_limits<double>::quiet_NaN(), j, d};
    if (std::abs(d) >= e.loss) e = {std::abs(d), j, d};
  }
  return e;
}

double fit_loss(const DensityModel& model, const FitGrid& grid) {
  model.validate();
  return FitProblem(model.theta, grid).evaluate(model).loss;
}

namespace {

using Params = std::array<double, 4>;

DensityModel to_model(double theta, const Params& p, double theta_prime) {
  return {theta, std::exp(p[0]), std::exp(p[1]), std::exp(p[2]), std::exp(p[3]), theta_prime};
}

struct Adam {
  Params m{}, v{};
  long t = 0;

  void reset() {
    m.fill(0.0);
    v.fill(0.0);
    t = 0;
  }

  void step(Params& p, const Params& g, double lr, const FitConfig& c) {
    ++t;
    const double b1t = 1.0 - std::pow(c.beta1, static_cast<double>(t));
    const double b2t = 1.0 - std::pow(c.beta2, static_cast<double>(t));
    for (int k = 0; k < 4; ++k) {
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
      p[k] -= lr * (m[k] / b1t) / (std::sqrt(v[k] / b2t) + c.adam_epsilon);
    }
  }
};

struct Plateau {
  double best = std::numeric_limits<double>::infinity();
  std::size_t since = 0;
  long cooldown = 0;

  void reset() { *this = Plateau{}; }

  bool observe(double loss, const FitConfig& c) {
    if (loss < best * (1.0 - c.plateau_threshold)) {
      best = loss;
      since = 0;
    } else {
      ++since;
    }
    --cooldown;
    if (since >= c.plateau_patience && cooldown <= 0) {
      since = 0;
      cooldown = static_cast<long>(c.plateau_cooldown);
      return true;
    }
    return false;
  }
};

[[noreturn]] void fail_non_finite(std::size_t epoch, const Params& p, double theta_prime) {
  std::ostringstream msg;
  msg << "fit: non-finite loss at epoch " << epoch << " (alpha=" << std::exp(p[0])
      << " gamma=" << std::exp(p[1]) << " lambda1=" << std::exp(p[2])
      << " lambda2=" << std::exp(p[3]) << " theta'=" << theta_prime << ")";
  throw NumericError(msg.str());
}

}  // namespace

FitResult fit(double theta, const FitConfig& c, std::uint64_t seed) {
  const double theta_prime_true = theta_conjugate(theta);
  if (c.epochs == 0 || c.steps_per_epoch == 0) {
    throw DomainError("fit: epochs and steps_per_epoch must be >= 1");
  }
  if (!(c.learning_rate > 0.0) || !(c.fd_step > 0.0) || !(c.init_jitter >= 0.0)) {
    throw DomainError("fit: learning rate and finite-difference step must be > 0");
  }
  const FitProblem problem(theta, c.grid);

  Params p{std::log(c.init_alpha), std::log(c.init_gamma), std::log(c.init_lambda1),
           std::log(c.init_lambda2)};
  for (double x : p) {
    if (!std::isfinite(x)) throw DomainError("fit: initial parameters must be > 0");
  }
  if (c.init_jitter > 0.0) {
    Rng rng(seed);
    for (int k = 0; k < 4; k += 2) {
      const double r = std::sqrt(-2.0 * std::log(rng.uniform_open()));
      const double a = 2.0 * kPi * rng.uniform_open();
      p[k] += c.init_jitter * r * std::cos(a);
      p[k + 1] += c.init_jitter * r * std::sin(a);
    }
  }

  auto theta_prime_at = [&](std::size_t epoch) {
    if (epoch >= c.anneal_epochs || c.anneal_epochs <= 1) return theta_prime_true;
    return 2.0 + (theta_prime_true - 2.0) * static_cast<double>(epoch) /
                     static_cast<double>(c.anneal_epochs - 1);
  };

  FitResult result{to_model(theta, p, theta_prime_true), std::numeric_limits<double>::infinity(), {}};
  Adam adam;
  Plateau plateau;
  double lr = c.learning_rate;

  for (std::size_t epoch = 0; epoch < c.epochs; ++epoch) {
    if (epoch == c.anneal_epochs && epoch > 0) {
      adam.reset();
      plateau.reset();
      lr = c.learning_rate;
    }
    const double tp = theta_prime_at(epoch);
    for (std::size_t step = 0; step < c.steps_per_epoch; ++step) {
      const auto e = problem.evaluate(to_model(theta, p, tp));
      if (!std::isfinite(e.loss)) fail_non_finite(epoch, p, tp);
      const double sign = e.signed_error > 0.0 ? 1.0 : (e.signed_error < 0.0 ? -1.0 : 0.0);
      Params grad{};
      for (int k = 0; k < 4; ++k) {
        Params hi = p, lo = p;
        hi[k] += c.fd_step;
        lo[k] -= c.fd_step;
        grad[k] = sign *
                  (problem.fitted_cdf_at(to_model(theta, hi, tp), e.argmax) -
                   problem.fitted_cdf_at(to_model(theta, lo, tp), e.argmax)) /
                  (2.0 * c.fd_step);
      }
      adam.step(p, grad, lr, c);
    }
    const double loss = problem.evaluate(to_model(theta, p, tp)).loss;
    if (!std::isfinite(loss)) fail_non_finite(epoch, p, tp);
    result.trace.push_back({epoch, loss, lr, tp});
    if (tp == theta_prime_true && loss < result.loss) {
      result.loss = loss;
      result.model = to_model(theta, p, tp);
    }
    if (plateau.observe(loss, c)) lr *= c.plateau_factor;
  }
  if (!std::isfinite(result.loss)) {
    result.model = to_model(theta, p, theta_prime_true);
    result.loss = problem.evaluate(result.model).loss;
    if (!std::isfinite(result.loss)) fail_non_finite(c.epochs, p, theta_prime_true);
  }
  return result;
}

AbsYDistribution::AbsYDistribution(const DensityModel& model, double y_max)
    : model_(model), y_max_(y_max) {
  model_.validate();
  if (!(y_max > 0.0) || !std::isfinite(y_max)) {
    throw DomainError("AbsYDistribution: y_max must be finite and > 0");
  }
  g0_ = density_at_zero(model_.theta);
  second_scale_ = g0_ * model_.lambda2 * std::tgamma(1.0 + 1.0 / model_.theta_prime);
  mass_ = raw_cdf(y_max_);
}

double AbsYDistribution::raw_cdf(double y) const {
  const double a = -std::expm1(-std::pow(y / model_.lambda1, model_.alpha));
  const double b = boost::math::gamma_p(1.0 / model_.theta_prime,
                                        std::pow(y / model_.lambda2, model_.theta_prime));
  return model_.gamma * a + second_scale_ * b;
}

double AbsYDistribution::raw_tail(double y) const {
  const double s = 1.0 / model_.theta_prime;
  const double a = std::exp(-std::pow(y / model_.lambda1, model_.alpha)) -
                   std::exp(-std::pow(y_max_ / model_.lambda1, model_.alpha));
  const double b = boost::math::gamma_q(s, std::pow(y / model_.lambda2, model_.theta_prime)) -
                   boost::math::gamma_q(s, std::pow(y_max_ / model_.lambda2, model_.theta_prime));
  return model_.gamma * a + second_scale_ * b;
}

double AbsYDistribution::density(double y) const {
  if (y < 0.0 || y > y_max_) return 0.0;
  return g_lambda(model_, y) / mass_;
}

double AbsYDistribution::cdf(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= y_max_) return 1.0;
  return std::min(1.0, raw_cdf(y) / mass_);
}

double AbsYDistribution::survival(double y) const {
  if (y <= 0.0) return 1.0;
  if (y >= y_max_) return 0.0;
  return std::max(0.0, raw_tail(y) / mass_);
}

double AbsYDistribution::quantile(double p, double q) const {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw DomainError("AbsYDistribution::quantile: p and q must lie in [0, 1]");
  }
  if (p == 0.0) return 0.0;
  if (q == 0.0) return y_max_;
  const bool lower = p <= 0.5;
  // Bisection on the side of the distribution that carries the precision.
  double lo = 0.0, hi = y_max_;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool below = lower ? cdf(mid) < p : survival(mid) > q;
    (below ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ActivationTable build_activation(const DensityModel& model, double fit_loss,
                                 const BuildConfig& c) {
  if (!(c.fine_step > 0.0) || !(c.coarse_step > 0.0) || !(c.fine_limit > 0.0) ||
      !(c.z_max > c.fine_limit)) {
    throw DomainError("build_activation: need 0 < fine_limit < z_max and positive steps");
  }
  const AbsYDistribution law(model, c.y_max);

  std::vector<double> z_pos;
  const auto n_fine = static_cast<std::size_t>(std::llround(c.fine_limit / c.fine_step));
  for (std::size_t i = 1; i <= n_fine; ++i) z_pos.push_back(static_cast<double>(i) * c.fine_step);
  const auto n_coarse =
      static_cast<std::size_t>(std::llround((c.z_max - c.fine_limit) / c.coarse_step));
  for (std::size_t i = 1; i <= n_coarse; ++i) {
    z_pos.push_back(c.fine_limit + static_cast<double>(i) * c.coarse_step);
  }

  std::vector<double> y_pos(z_pos.size());
  for (std::size_t i = 0; i < z_pos.size(); ++i) {
    const double p = std::erf(z_pos[i] / kSqrt2);
    const double q = std::erfc(z_pos[i] / kSqrt2);
    y_pos[i] = law.quantile(p, q);
    if (!(y_pos[i] > (i == 0 ? 0.0 : y_pos[i - 1])) || !(y_pos[i] < c.y_max)) {
      std::ostringstream msg;
      msg << "build_activation: inverse CDF not strictly increasing at z=" << z_pos[i];
      throw DomainError(msg.str());
    }
  }

  const std::size_t n = z_pos.size();
  std::vector<double> grid(2 * n + 1), values(2 * n + 1);
  grid[n] = 0.0;
  values[n] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    grid[n + 1 + i] = z_pos[i];
    values[n + 1 + i] = y_pos[i];
    grid[n - 1 - i] = -z_pos[i];
    values[n - 1 - i] = -y_pos[i];
  }
  auto fmt = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  ActivationTable::HeaderFields extra{
      {"alpha", fmt(model.alpha)},     {"gamma", fmt(model.gamma)},
      {"lambda1", fmt(model.lambda1)}, {"lambda2", fmt(model.lambda2)},
      {"t_trunc", fmt(c.y_max)},
  };
  return ActivationTable(model.theta, std::move(grid), std::move(values), fit_loss,
                         std::move(extra));
}

std::span<const double> shipped_thetas() {
  static constexpr double kThetas[] = {2.05, 2.5, 3.0, 4.0, 5.0, 7.0, 10.0};
  return kThetas;
}

std::shared_ptr<const ActivationTable> shipped_activation(
    double theta, const std::filesystem::path& cache_dir) {
  theta_conjugate(theta);
  std::filesystem::path file;
  if (!cache_dir.empty()) {
    char name[64];
    std::snprintf(name, sizeof name, "phi_theta_%g.csv", theta);
    file = cache_dir / name;
    if (std::filesystem::exists(file)) {
      auto table = std::make_shared<const ActivationTable>(ActivationTable::load_csv(file));
      if (table->theta() == theta) return table;
    }
  }
  const FitResult result = fit(theta);
  auto table = std::make_shared<const ActivationTable>(build_activation(result.model, result.loss));
  if (!file.empty()) {
    std::filesystem::create_directories(cache_dir);
    const auto tmp = std::filesystem::path(file).concat(".tmp");
    table->save_csv(tmp);
    std::filesystem::rename(tmp, file);
  }
  return table;
}

}  // namespace gausspre
