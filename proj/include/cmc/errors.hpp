#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or parameter lies outside the domain of a function (e.g. x⁰ ∉ I).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Metric not Lorentzian / spatial part not positive definite / singular.
class InvalidMetricError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// |Du| ≥ 1 somewhere on a graph.
class SpacelikeViolation : public Error {
 public:
  SpacelikeViolation(std::size_t worst_index, double du_squared);
  std::size_t worst_index() const { return worst_index_; }
  double du_squared() const { return du_squared_; }

 private:
  std::size_t worst_index_;
  double du_squared_;
};

/// The linearized mean curvature operator is singular at the slice.
class DegenerateSliceError : public Error {
 public:
  DegenerateSliceError(const std::string& what, double lambda_min);
  double lambda_min() const { return lambda_min_; }

 private:
  double lambda_min_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> residual_history);
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Two evaluations of the same geometric quantity disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Spacetime grid points not bracketed by the leaves of a foliation.
class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, std::vector<std::size_t> uncovered);
  const std::vector<std::size_t>& uncovered() const { return uncovered_; }

 private:
  std::vector<std::size_t> uncovered_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Expression evaluated outside its domain (log of a non-positive number, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmc
