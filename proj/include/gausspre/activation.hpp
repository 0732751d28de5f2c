#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "gausspre/activation_table.hpp"
#include "gausspre/quadrature.hpp"

namespace gausspre {

enum class ActivationKind { identity, relu, tanh, delta_omega, table };

/// Cheap, copyable, immutable handle to a scalar activation.
class Activation {
 public:
  static Activation identity();
  static Activation relu();
  static Activation tanh();
  /// x exp((delta/omega) sin(omega ln|x|)), 0 at x = 0.
  static Activation delta_omega(double delta, double omega);
  static Activation from_table(std::shared_ptr<const ActivationTable> table);
  /// "identity", "relu" or "tanh"; throws DomainError otherwise.
  static Activation parse(std::string_view name);

  double operator()(double x) const;
  void apply(std::span<const double> in, std::span<double> out) const;

  ActivationKind kind() const { return kind_; }
  std::string name() const;
  bool is_odd() const { return kind_ != ActivationKind::relu; }
  double delta() const { return delta_; }
  double omega() const { return omega_; }
  const ActivationTable* table() const { return table_.get(); }

  /// Quadrature rules suited to this activation: log-variable rules when the
  /// function oscillates in ln|x| near the origin, Gauss rules otherwise.
  const GaussRule& rule_1d() const;
  const BivariateRule& rule_2d() const;

 private:
  Activation(ActivationKind kind) : kind_(kind) {}

  ActivationKind kind_;
  double delta_ = 0.0;
  double omega_ = 1.0;
  std::shared_ptr<const ActivationTable> table_;
};

}  // namespace gausspre
