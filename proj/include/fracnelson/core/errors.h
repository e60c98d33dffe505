#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracnelson {

/// Cholesky factorization met a non-positive pivot.
class CholeskyError : public std::runtime_error {
 public:
  CholeskyError(std::size_t pivot, double value);
  std::size_t pivot() const noexcept { return pivot_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t pivot_;
  double value_;
};

/// Circulant embedding produced a negative eigenvalue.
class EmbeddingError : public std::runtime_error {
 public:
  EmbeddingError(std::size_t index, double eigenvalue);
  std::size_t index() const noexcept { return index_; }
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::size_t index_;
  double eigenvalue_;
};

/// A kernel evaluator returned a non-finite value.
class KernelEvaluationError : public std::runtime_error {
 public:
  KernelEvaluationError(double t, double s, double value);
  double t() const noexcept { return t_; }
  double s() const noexcept { return s_; }

 private:
  double t_, s_;
};

/// Requested a closed form that is not available for these parameters.
class UnsupportedFormError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside an ODE or SDE solver.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t step, double t);
  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return t_; }

 private:
  std::size_t step_;
  double t_;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracnelson
