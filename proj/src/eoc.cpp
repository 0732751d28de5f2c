#include "gausspre/eoc.hpp"

#include <cmath>
#include <sstream>

#include "gausspre/error.hpp"
#include "gausspre/parallel.hpp"

namespace gausspre {

namespace {

constexpr double kCollapseLevel = 1e-6;
constexpr double kDivergeLevel = 1e12;
constexpr double kCollapsedEvaluationVariance = 1e-8;

double second_moment(double v, const Activation& phi) {
  return gauss_expect_1d([&phi](double x) { const double y = phi(x); return y * y; },
                         v, phi.rule_1d());
}

double cross_moment(double c, double va, double vb, const Activation& phi) {
  return gauss_expect_2d([&phi](double x, double y) { return phi(x) * phi(y); },
                         va, vb, c, phi.rule_2d());
}

}  // namespace

void EocSetting::validate() const {
  if (!(sigma_w > 0.0) || !std::isfinite(sigma_w)) {
    throw DomainError("sigma_w must be finite and > 0");
  }
  if (!(sigma_b >= 0.0) || !std::isfinite(sigma_b)) {
    throw DomainError("sigma_b must be finite and >= 0");
  }
}

double variance_map(double v, const EocSetting& setting) {
  setting.validate();
  if (!(v >= 0.0)) throw DomainError("variance_map: v must be >= 0");
  const double sw2 = setting.sigma_w * setting.sigma_w;
  return sw2 * second_moment(v, setting.activation) + setting.sigma_b * setting.sigma_b;
}

double correlation_map(double c, double va, double vb, const EocSetting& setting) {
  setting.validate();
  if (!(va > 0.0 && vb > 0.0)) {
    throw DomainError("correlation_map: variances must be > 0");
  }
  const double sw2 = setting.sigma_w * setting.sigma_w;
  const double sb2 = setting.sigma_b * setting.sigma_b;
  const double numerator = sw2 * cross_moment(c, va, vb, setting.activation) + sb2;
  const double norm = std::sqrt(variance_map(va, setting) * variance_map(vb, setting));
  if (!(norm > 0.0)) throw NumericError("correlation_map: zero output variance");
  return numerator / norm;
}

const char* to_string(VarianceRegime regime) {
  switch (regime) {
    case VarianceRegime::converged:
      return "converged";
    case VarianceRegime::collapsed:
      return "collapsed";
    case VarianceRegime::diverged:
      return "diverged";
  }
  return "unknown";
}

VarianceIteration iterate_variance(const EocSetting& setting, double v0,
                                   int max_iterations) {
  if (!(v0 > 0.0)) throw DomainError("iterate_variance: v0 must be > 0");
  double v = v0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double next = variance_map(v, setting);
    if (!std::isfinite(next) || next > kDivergeLevel) {
      return {next, VarianceRegime::diverged, it};
    }
    if (next < 1e-300) return {next, VarianceRegime::collapsed, it};
    const bool small_step = std::abs(next - v) < 1e-10 * std::max(1.0, v);
    v = next;
    if (small_step && v >= kCollapseLevel) return {v, VarianceRegime::converged, it};
  }
  const double step = variance_map(v, setting) - v;
  if (v >= kCollapseLevel && std::abs(step) <= 1e-6 * v) {
    return {v, VarianceRegime::converged, max_iterations};
  }
  return {v, step < 0.0 ? VarianceRegime::collapsed : VarianceRegime::diverged,
          max_iterations};
}

double correlation_map_star(double c, const EocSetting& setting,
                            std::optional<double> v_star) {
  double v = 0.0;
  if (v_star) {
    v = *v_star;
  } else {
    const VarianceIteration fp = iterate_variance(setting);
    if (fp.regime != VarianceRegime::converged) {
      throw NumericError(std::string("correlation_map_star: no nonzero fixed point (variance ") +
                         to_string(fp.regime) + ")");
    }
    v = fp.v_star;
  }
  return correlation_map(c, v, v, setting);
}

Chi1Result chi1(const EocSetting& setting, std::optional<double> v_star) {
  setting.validate();
  Chi1Result result{};
  if (v_star) {
    result.v_star = *v_star;
    result.regime = VarianceRegime::converged;
  } else {
    const VarianceIteration fp = iterate_variance(setting);
    result.regime = fp.regime;
    result.v_star = fp.regime == VarianceRegime::collapsed ? kCollapsedEvaluationVariance
                                                           : fp.v_star;
  }
  if (!std::isfinite(result.v_star) || !(result.v_star > 0.0)) {
    throw NumericError("chi1: variance is not a finite positive number");
  }
  const double v = result.v_star;
  const double sw2 = setting.sigma_w * setting.sigma_w;
  const double sb2 = setting.sigma_b * setting.sigma_b;
  // Dividing by v rather than V(v) is the same at a fixed point and gives
  // the limiting slope sigma_w^2 E[phi'(x) phi'(y)] when v is a limit of a
  // collapsing or diverging iteration.
  const double norm = v;
  auto star = [&](double c) {
    return (sw2 * cross_moment(c, v, v, setting.activation) + sb2) / norm;
  };
  const double at_one = star(1.0);
  auto difference = [&](double h) { return (at_one - star(1.0 - h)) / h; };
  constexpr double h = 1e-4;
  const double d1 = difference(h), d2 = difference(h / 2), d3 = difference(h / 4);
  // C*(1 - h) carries h^(1/2)-type terms from kinks as well as h terms.
  const double r = std::sqrt(2.0);
  const double e1 = (r * d2 - d1) / (r - 1.0);
  const double e2 = (r * d3 - d2) / (r - 1.0);
  result.chi1 = 2.0 * e2 - e1;
  return result;
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::ordered:
      return "ordered";
    case Phase::chaotic:
      return "chaotic";
    case Phase::edge:
      return "edge";
  }
  return "unknown";
}

Phase phase_classify(const EocSetting& setting, double tol) {
  const double slope = chi1(setting).chi1;
  if (std::abs(slope - 1.0) <= tol) return Phase::edge;
  return slope < 1.0 ? Phase::ordered : Phase::chaotic;
}

EocCurve eoc_curve(const Activation& activation,
                   std::span<const double> sigma_b_grid,
                   const EocCurveOptions& options) {
  if (!(options.sigma_w_min > 0.0) || !(options.sigma_w_max > options.sigma_w_min)) {
    throw DomainError("eoc_curve: need 0 < sigma_w_min < sigma_w_max");
  }
  for (double sb : sigma_b_grid) {
    if (!(sb >= 0.0)) throw DomainError("eoc_curve: sigma_b must be >= 0");
  }
  struct Outcome {
    std::optional<EocPoint> point;
    std::string warning;
  };
  std::vector<Outcome> outcomes(sigma_b_grid.size());
  parallel_for(sigma_b_grid.size(), options.threads, [&](std::size_t k) {
    const double sb = sigma_b_grid[k];
    auto evaluate = [&](double sw) {
      return chi1(EocSetting{sw, sb, activation});
    };
    double lo = options.sigma_w_min, hi = options.sigma_w_max;
    Chi1Result f_lo = evaluate(lo), f_hi = evaluate(hi);
    if ((f_lo.chi1 - 1.0) * (f_hi.chi1 - 1.0) > 0.0) {
      std::ostringstream os;
      os << "no sign change of chi1 - 1 on sigma_w in [" << lo << ", " << hi
         << "] (chi1 = " << f_lo.chi1 << ", " << f_hi.chi1 << ")";
      outcomes[k].warning = os.str();
      return;
    }
    const bool increasing = f_lo.chi1 < f_hi.chi1;
    Chi1Result mid_value = f_lo;
    double mid = lo;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      mid = 0.5 * (lo + hi);
      mid_value = evaluate(mid);
      if ((mid_value.chi1 < 1.0) == increasing) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    std::ostringstream os;
    if (mid_value.regime == VarianceRegime::diverged) {
      os << "variance diverges at the root sigma_w = " << mid;
      outcomes[k].warning = os.str();
      return;
    }
    if (std::abs(mid_value.chi1 - 1.0) > options.tol) {
      os << "root sigma_w = " << mid << " has |chi1 - 1| = "
         << std::abs(mid_value.chi1 - 1.0) << " > " << options.tol;
      outcomes[k].warning = os.str();
      return;
    }
    outcomes[k].point = EocPoint{sb, mid, mid_value.v_star, mid_value.chi1, mid_value.regime};
  });
  EocCurve curve;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].point) {
      curve.points.push_back(*outcomes[k].point);
    } else {
      curve.warnings.push_back({sigma_b_grid[k], outcomes[k].warning});
    }
  }
  return curve;
}

double phi_delta_omega(double delta, double omega, double x) {
  const double a = std::abs(x);
  if (a <= 1e-300) return 0.0;
  return x * std::exp((delta / omega) * std::sin(omega * std::log(a)));
}

double sigma_omega(double delta, double omega) {
  if (!(delta > 0.0 && delta <= 1.0) || !(omega > 0.0)) {
    throw DomainError("sigma_omega needs delta in (0, 1] and omega > 0");
  }
  const double k = 2.0 * delta / omega;
  auto moment = [&](double sign) {
    return gauss_expect_1d(
        [&](double z) {
          const double a = std::abs(z);
          return a * a * std::exp(sign * k * std::sin(omega * std::log(a)));
        },
        1.0, default_log_rule());
  };
  const double v_low = moment(-1.0), v_upp = moment(1.0);
  return 1.0 / std::sqrt(0.5 * (v_low + v_upp));
}

FixedPointReport find_fixed_points(const EocSetting& setting, double v_min,
                                   double v_max, std::size_t grid_points) {
  if (!(v_min > 0.0) || !(v_max > v_min) || grid_points < 2) {
    throw DomainError("find_fixed_points: need 0 < v_min < v_max and >= 2 grid points");
  }
  setting.validate();
  FixedPointReport report;
  report.v_min = v_min;
  report.v_max = v_max;
  auto gap = [&](double v) { return variance_map(v, setting) - v; };

  std::vector<double> grid(grid_points), values(grid_points);
  const double log_lo = std::log(v_min), log_hi = std::log(v_max);
  bool all_fixed = true;
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                    static_cast<double>(grid_points - 1));
    values[i] = gap(grid[i]);
    if (std::abs(values[i]) > 1e-10 * grid[i]) all_fixed = false;
  }
  if (all_fixed) {
    report.degenerate_continuum = true;
    return report;
  }

  auto classify = [&](double v) {
    constexpr double h = 1e-5;
    const double slope =
        (variance_map(v * (1.0 + h), setting) - variance_map(v * (1.0 - h), setting)) /
        (2.0 * h * v);
    report.points.push_back({v, std::abs(slope) < 1.0, slope});
  };

  for (std::size_t i = 0; i + 1 < grid_points; ++i) {
    const double f0 = values[i], f1 = values[i + 1];
    if (f0 == 0.0) {
      classify(grid[i]);
      continue;
    }
    if (f0 * f1 >= 0.0) continue;
    double lo = grid[i], hi = grid[i + 1], f_lo = f0;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      const double f_mid = gap(mid);
      if (std::abs(f_mid) < 1e-8 * mid || hi - lo < 1e-15 * mid) break;
      if ((f_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    classify(mid);
  }
  if (values.back() == 0.0) classify(grid.back());
  return report;
}

double log_variance_ratio(double r, const EocSetting& setting) {
  const double v = std::exp(r);
  return std::log(variance_map(v, setting) / v);
}

}  // namespace gausspre
