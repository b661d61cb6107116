#ifndef ZETAGAP_ERRORS_HPP
#define ZETAGAP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zetagap {

/// Base class for all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (zeta outside [0,1/2), bad counts, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input violates a structural invariant (non-stochastic rows, non-reversible kernel, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured capacity.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A factorization or solve failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace tol {
// Row sums and stationary-law normalization.
inline constexpr double kSum = 1e-12;
// Structural checks at construction: detailed balance.
inline constexpr double kConstruction = 1e-10;
// Algebraic identities (Dirichlet form vs. variance decomposition, ...).
inline constexpr double kIdentity = 1e-12;
// Slack granted to inequality checks (Cheeger, mixing bounds).
inline constexpr double kInequality = 1e-9;
}  // namespace tol

}  // namespace zetagap

#endif
