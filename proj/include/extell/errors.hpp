#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace extell {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a size function, w^p map or elliptic integral.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A representation needed a positive definite matrix and got a singular one.
class SingularRepresentation : public Error {
 public:
  using Error::Error;
};

/// The coordinate origin is not strictly inside the ellipsoid, so the
/// homogeneous/dual normalization is undefined. Re-center coordinates.
class OriginNotInterior : public Error {
 public:
  using Error::Error;
};

/// Iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Solver preflight rejected the problem (unbounded or empty body, center outside, ...).
/// `certificate` is a recession direction or a best-effort point; `row` the offending half-space.
class PreflightError : public Error {
 public:
  explicit PreflightError(const std::string& what, std::vector<double> certificate = {}, int row = -1)
      : Error(what), certificate_(std::move(certificate)), row_(row) {}
  const std::vector<double>& certificate() const noexcept { return certificate_; }
  int row() const noexcept { return row_; }

 private:
  std::vector<double> certificate_;
  int row_;
};

}  // namespace extell
