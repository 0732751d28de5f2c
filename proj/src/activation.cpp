#include "gausspre/activation.hpp"

#include <cmath>
#include <sstream>

#include "gausspre/eoc.hpp"
#include "gausspre/error.hpp"

namespace gausspre {

Activation Activation::identity() { return Activation(ActivationKind::identity); }

Activation Activation::relu() { return Activation(ActivationKind::relu); }

Activation Activation::tanh() { return Activation(ActivationKind::tanh); }

Activation Activation::delta_omega(double delta, double omega) {
  if (!(delta >= 0.0 && delta <= 1.0) || !(omega > 0.0)) {
    throw DomainError("phi_delta_omega needs delta in [0, 1] and omega > 0");
  }
  Activation a(ActivationKind::delta_omega);
  a.delta_ = delta;
  a.omega_ = omega;
  return a;
}

Activation Activation::from_table(std::shared_ptr<const ActivationTable> table) {
  if (!table) throw DomainError("activation table handle is empty");
  Activation a(ActivationKind::table);
  a.table_ = std::move(table);
  return a;
}

Activation Activation::parse(std::string_view name) {
  if (name == "identity" || name == "id") return identity();
  if (name == "relu") return relu();
  if (name == "tanh") return tanh();
  throw DomainError("unknown activation '" + std::string(name) +
                    "' (expected identity, relu, tanh or a table file)");
}

double Activation::operator()(double x) const {
  switch (kind_) {
    case ActivationKind::identity:
      return x;
    case ActivationKind::relu:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::tanh:
      return std::tanh(x);
    case ActivationKind::delta_omega:
      return phi_delta_omega(delta_, omega_, x);
    case ActivationKind::table:
      return table_->eval(x);
  }
  return x;
}

void Activation::apply(std::span<const double> in, std::span<double> out) const {
  switch (kind_) {
    case ActivationKind::identity:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i];
      return;
    case ActivationKind::relu:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
      return;
    case ActivationKind::tanh:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::tanh(in[i]);
      return;
    case ActivationKind::delta_omega:
      for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = phi_delta_omega(delta_, omega_, in[i]);
      }
      return;
    case ActivationKind::table:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = table_->eval(in[i]);
      return;
  }
}

std::string Activation::name() const {
  switch (kind_) {
    case ActivationKind::identity:
      return "identity";
    case ActivationKind::relu:
      return "relu";
    case ActivationKind::tanh:
      return "tanh";
    case ActivationKind::delta_omega: {
      std::ostringstream os;
      os << "phi_delta_omega(" << delta_ << "," << omega_ << ")";
      return os.str();
    }
    case ActivationKind::table: {
      std::ostringstream os;
      os << "phi_theta(" << table_->theta() << ")";
      return os.str();
    }
  }
  return "unknown";
}

const GaussRule& Activation::rule_1d() const {
  return kind_ == ActivationKind::delta_omega ? default_log_rule()
                                              : default_hermite_rule();
}

const BivariateRule& Activation::rule_2d() const {
  return kind_ == ActivationKind::delta_omega ? default_log_bivariate_rule()
                                              : default_bivariate_rule();
}

}  // namespace gausspre
