#pragma once

#include <stdexcept>
#include <string>

namespace gausspre {

// Argument outside an operation's domain (bad shape parameter, p outside (0,1),
// mismatched widths, malformed files). The CLI maps it to exit code 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a usable number: non-finite integrand,
// missing fixed point, diverging optimizer. The CLI maps it to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gausspre
