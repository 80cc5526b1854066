#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ricci {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fields from different backends (or resolutions) were combined.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value left the finite range (NaN or Inf) during an operation.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// A Poisson-type right-hand side violates the solvability condition.
class InfeasibleRhsError : public Error {
 public:
  InfeasibleRhsError(const std::string& what, double offending_mean)
      : Error(what), mean_(offending_mean) {}
  double offending_mean() const noexcept { return mean_; }

 private:
  double mean_;
};

/// Newton iteration failed to reach its tolerance.
class SolverStallError : public Error {
 public:
  SolverStallError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Data does not lie in the expected cohomology class (wrong mu, wrong total).
class ClassMismatchError : public Error {
 public:
  using Error::Error;
};

/// A potential does not define a Kähler form (density not strictly positive).
class NotKahlerError : public Error {
 public:
  NotKahlerError(const std::string& what, double margin) : Error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

/// Operation not available on this backend.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A post-condition check of the library itself failed.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

class GaugeFixError : public Error {
 public:
  using Error::Error;
};

/// Positivity lost somewhere along the affine path used by a functional.
class PathError : public Error {
 public:
  using Error::Error;
};

/// Oracle refused the request (resolution cap).
class OracleRefusal : public Error {
 public:
  using Error::Error;
};

}  // namespace ricci
