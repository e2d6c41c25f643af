#pragma once

#include <stdexcept>
#include <string>

namespace fzk {

// Invalid user input: grids, configs, region parameters.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Parameter outside the range where the operation is defined.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Non-finite values, failed quadrature, broken symmetry checks.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fzk
