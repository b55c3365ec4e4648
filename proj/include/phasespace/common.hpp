#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace phasespace {

using Complex = std::complex<double>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mode, site or trajectory index outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on an argument value.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Weighted estimation impossible (no alive trajectories in a block).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or run configuration; `key` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Oracle problem too large for dense diagonalization.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Fock truncation loses more norm than allowed.
class CutoffError : public Error {
 public:
  using Error::Error;
};

/// A mapping produced values it should never produce (e.g. imaginary parts
/// in a real-valued phase-space equation).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace phasespace
