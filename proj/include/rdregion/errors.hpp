#pragma once

#include <stdexcept>
#include <string>

namespace rdregion {

// Root of every error thrown by the library. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& label)
      : Error("unknown variable '" + label + "'"), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class DuplicateVariable : public Error {
 public:
  explicit DuplicateVariable(const std::string& label)
      : Error("duplicate variable '" + label + "'"), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

// Malformed information query, e.g. overlapping variable sets in I(A;B|C).
class InvalidQuery : public Error {
 public:
  using Error::Error;
};

// Probability tables that violate their invariants (negative entries, rows not summing to 1, ...).
class DistributionError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class DecoderError : public Error {
 public:
  using Error::Error;
};

// A structural constraint (Markov chain, BN independence, separable-bound zero term) failed.
class ConstraintError : public Error {
 public:
  ConstraintError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Search / simulation configuration outside supported resource limits.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  InsufficientSamples(const std::string& what, double acceptance_rate)
      : Error(what), acceptance_rate_(acceptance_rate) {}
  double acceptance_rate() const noexcept { return acceptance_rate_; }

 private:
  double acceptance_rate_;
};

}  // namespace rdregion
