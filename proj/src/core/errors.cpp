#include "fracnelson/core/errors.h"

#include <sstream>

namespace fracnelson {

namespace {

std::string cholesky_message(std::size_t pivot, double value) {
  std::ostringstream os;
  os << "Cholesky factorization failed at pivot " << pivot << " (value " << value
     << "); grid points may be too close together";
  return os.str();
}

std::string embedding_message(std::size_t index, double eigenvalue) {
  std::ostringstream os;
  os << "circulant embedding eigenvalue " << index << " is negative (" << eigenvalue
     << "); the autocovariance is not embeddable";
  return os.str();
}

std::string kernel_message(double t, double s, double value) {
  std::ostringstream os;
  os << "kernel evaluation at (t=" << t << ", s=" << s << ") returned " << value;
  return os.str();
}

std::string solver_message(const std::string& what, std::size_t step, double t) {
  std::ostringstream os;
  os << what << " at step " << step << " (t=" << t << ")";
  return os.str();
}

}  // namespace

CholeskyError::CholeskyError(std::size_t pivot, double value)
    : std::runtime_error(cholesky_message(pivot, value)), pivot_(pivot), value_(value) {}

EmbeddingError::EmbeddingError(std::size_t index, double eigenvalue)
    : std::runtime_error(embedding_message(index, eigenvalue)), index_(index), eigenvalue_(eigenvalue) {}

KernelEvaluationError::KernelEvaluationError(double t, double s, double value)
    : std::runtime_error(kernel_message(t, s, value)), t_(t), s_(s) {}

SolverError::SolverError(const std::string& what, std::size_t step, double t)
    : std::runtime_error(solver_message(what, step, t)), step_(step), t_(t) {}

}  // namespace fracnelson
