// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_ERRORS_HPP
#define HPFAS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hpfas {

/// Argument outside the mathematical domain of a function (negative, non-finite, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A parameter set or layout violates one of its invariants.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace hpfas

#endif // HPFAS_ERRORS_HPP
