#pragma once

#include <stdexcept>
#include <string>

namespace talbot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unparseable user input (config files, optical tables).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A query outside the domain covered by tabulated data.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity violated an invariant it must satisfy (non-real Talbot
/// coefficient, negative probability density, unstable integration, ...).
class NumericIntegrityError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericIntegrityError {
 public:
  QuadratureError(const std::string& what, double best_estimate, double error_estimate)
      : NumericIntegrityError(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace talbot
