#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gausspre {

/// Tabulated strictly increasing activation phi_theta.
///
/// Inside the grid the table is a monotone piecewise-cubic Hermite
/// interpolant (Fritsch–Carlson slopes). Outside it follows the power tail
/// phi(z) ~ A |z|^(1 - 2/theta), the growth implied by a GWT(theta') law for
/// phi(G) with 1/theta + 1/theta' = 1/2; A is matched at each grid end.
class ActivationTable {
 public:
  using HeaderFields = std::vector<std::pair<std::string, std::string>>;

  /// Throws DomainError unless the grid and values are strictly increasing,
  /// of equal length >= 2, and theta > 2.
  ActivationTable(double theta, std::vector<double> grid,
                  std::vector<double> values, double fit_loss,
                  HeaderFields extra_header = {});

  double theta() const { return theta_; }
  double fit_loss() const { return fit_loss_; }
  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const HeaderFields& extra_header() const { return extra_; }

  double tail_exponent() const { return tail_exponent_; }
  double tail_coefficient_pos() const { return tail_pos_; }
  double tail_coefficient_neg() const { return tail_neg_; }

  double eval(double x) const;
  double deriv(double x) const;

  /// `# gausspre-activation theta=<t> fit_loss=<l> version=1 [k=v ...]`,
  /// then a `z,phi` header row and one row per grid node.
  void write_csv(std::ostream& out) const;
  void save_csv(const std::filesystem::path& path) const;
  /// Parses the format above and re-checks monotonicity.
  static ActivationTable read_csv(std::istream& in);
  static ActivationTable load_csv(const std::filesystem::path& path);

 private:
  double eval_positive_branch(double x) const;

  double theta_;
  double fit_loss_;
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  HeaderFields extra_;
  double tail_exponent_;
  double tail_pos_;
  double tail_neg_;
  bool odd_;
};

/// Fritsch–Carlson (PCHIP) slopes for monotone data.
std::vector<double> pchip_slopes(std::span<const double> x,
                                 std::span<const double> y);

}  // namespace gausspre
