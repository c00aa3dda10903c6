#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace envelope {

using cplx = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Thrown when a model, grid or solver precondition is violated.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ker L(omega, kappa) does not have dimension one.
class KernelDimensionError : public std::runtime_error {
 public:
  KernelDimensionError(const std::string& what, int dim)
      : std::runtime_error(what), dimension(dim) {}
  int dimension;
};

class CommensurabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnderResolvedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Solver produced NaN/Inf or exceeded the blow-up guard.
class NumericalBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace envelope
