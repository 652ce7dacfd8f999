#pragma once

#include <stdexcept>
#include <string>

namespace clab {

/// Invalid model, functional or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation (s < 0, p < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The model has no closed-form conditional-moment oracle.
class UnsupportedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Path makes a statistic undefined (zero denominator, zero residual variance).
class DegeneratePathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-sample comparison refused because too many replications were flagged.
class ComparisonRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clab
