#include "gausspre/activation_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gausspre/error.hpp"

namespace gausspre {

namespace {

double pchip_end_slope(double h0, double h1, double d0, double d1) {
  double slope = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (slope * d0 <= 0.0) return 0.0;
  if (d0 * d1 <= 0.0 && std::abs(slope) > std::abs(3.0 * d0)) return 3.0 * d0;
  return slope;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<double> pchip_slopes(std::span<const double> x,
                                 std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> slopes(n, 0.0);
  if (n < 2) return slopes;
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    slopes[0] = slopes[1] = delta[0];
    return slopes;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  slopes[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
  slopes[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return slopes;
}

ActivationTable::ActivationTable(double theta, std::vector<double> grid,
                                 std::vector<double> values, double fit_loss,
                                 HeaderFields extra_header)
    : theta_(theta),
      fit_loss_(fit_loss),
      grid_(std::move(grid)),
      values_(std::move(values)),
      extra_(std::move(extra_header)) {
  if (!(theta_ > 2.0)) throw DomainError("activation table: theta must be > 2");
  if (grid_.size() < 2 || grid_.size() != values_.size()) {
    throw DomainError("activation table: need >= 2 nodes and matching lengths");
  }
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) {
      throw DomainError("activation table: grid is not strictly increasing");
    }
    if (!(values_[i] > values_[i - 1])) {
      throw DomainError("activation table: values are not strictly increasing at z=" +
                        format_double(grid_[i]));
    }
  }
  slopes_ = pchip_slopes(grid_, values_);

  tail_exponent_ = 1.0 - 2.0 / theta_;
  const double z_hi = grid_.back(), z_lo = grid_.front();
  tail_pos_ = z_hi > 0.0 ? values_.back() / std::pow(z_hi, tail_exponent_) : 0.0;
  tail_neg_ = z_lo < 0.0 ? -values_.front() / std::pow(-z_lo, tail_exponent_) : 0.0;

  const std::size_t n = grid_.size();
  odd_ = true;
  for (std::size_t i = 0; i < n && odd_; ++i) {
    odd_ = grid_[i] == -grid_[n - 1 - i] && values_[i] == -values_[n - 1 - i];
  }
}

double ActivationTable::eval_positive_branch(double x) const {
  if (x >= grid_.back()) {
    return tail_pos_ > 0.0 ? tail_pos_ * std::pow(x, tail_exponent_)
                           : values_.back() + slopes_.back() * (x - grid_.back());
  }
  if (x <= grid_.front()) {
    return tail_neg_ > 0.0 ? -tail_neg_ * std::pow(-x, tail_exponent_)
                           : values_.front() + slopes_.front() * (x - grid_.front());
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double t = (x - grid_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] +
         h11 * h * slopes_[i + 1];
}

double ActivationTable::eval(double x) const {
  if (odd_ && x < 0.0) return -eval_positive_branch(-x);
  return eval_positive_branch(x);
}

double ActivationTable::deriv(double x) const {
  if (odd_ && x < 0.0) x = -x;
  if (x >= grid_.back()) {
    return tail_pos_ > 0.0 ? tail_pos_ * tail_exponent_ * std::pow(x, tail_exponent_ - 1.0)
                           : slopes_.back();
  }
  if (x <= grid_.front()) {
    return tail_neg_ > 0.0
               ? tail_neg_ * tail_exponent_ * std::pow(-x, tail_exponent_ - 1.0)
               : slopes_.front();
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double t = (x - grid_[i]) / h;
  const double t2 = t * t;
  const double d00 = (6.0 * t2 - 6.0 * t) / h;
  const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double d01 = (-6.0 * t2 + 6.0 * t) / h;
  const double d11 = 3.0 * t2 - 2.0 * t;
  return d00 * values_[i] + d10 * slopes_[i] + d01 * values_[i + 1] +
         d11 * slopes_[i + 1];
}

void ActivationTable::write_csv(std::ostream& out) const {
  out << "# gausspre-activation theta=" << format_double(theta_)
      << " fit_loss=" << format_double(fit_loss_) << " version=1";
  for (const auto& [key, value] : extra_) out << ' ' << key << '=' << value;
  out << "\nz,phi\n";
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    out << format_double(grid_[i]) << ',' << format_double(values_[i]) << '\n';
  }
}

void ActivationTable::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write activation table " + path.string());
  write_csv(out);
}

ActivationTable ActivationTable::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# gausspre-activation", 0) != 0) {
    throw DomainError("activation table: missing '# gausspre-activation' header");
  }
  std::istringstream header(line.substr(std::string("# gausspre-activation").size()));
  double theta = NAN, fit_loss = NAN;
  std::string version;
  HeaderFields extra;
  std::string token;
  while (header >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "theta") {
      theta = std::stod(value);
    } else if (key == "fit_loss") {
      fit_loss = std::stod(value);
    } else if (key == "version") {
      version = value;
    } else {
      extra.emplace_back(key, value);
    }
  }
  if (std::isnan(theta) || version != "1") {
    throw DomainError("activation table: header needs theta=<value> and version=1");
  }
  std::vector<double> grid, values;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("z,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("activation table: malformed row '" + line + "'");
    }
    try {
      grid.push_back(std::stod(line.substr(0, comma)));
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw DomainError("activation table: malformed row '" + line + "'");
    }
  }
  return ActivationTable(theta, std::move(grid), std::move(values),
                         std::isnan(fit_loss) ? 0.0 : fit_loss, std::move(extra));
}

ActivationTable ActivationTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open activation table " + path.string());
  return read_csv(in);
}

}  // namespace gausspre
