#ifndef MINSURF_ERRORS_HPP
#define MINSURF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace minsurf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (r > r_max, n > 5, q <= 1/2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Curvature at the pole requested through a pointwise formula.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or inconsistent configuration. Carries a 1-based location when
/// the failure comes from text input (0 means unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"
                       : what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A scenario or mesh violates a structural invariant; `residual` is the
/// offending value.
class InvariantError : public ConfigError {
 public:
  InvariantError(const std::string& what, double residual)
      : ConfigError(what + " [residual " + std::to_string(residual) + "]"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Numerical procedure failed to converge or two independent routes disagree.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Mesh topology problems (non-manifold edge, bad index, degenerate face).
class TopologyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace minsurf

#endif  // MINSURF_ERRORS_HPP
