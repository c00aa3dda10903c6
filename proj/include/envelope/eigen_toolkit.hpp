#pragma once

#include <string>
#include <vector>

#include "envelope/system_model.hpp"

namespace envelope {

// Eigendecompositions L_j(theta) = Psi diag(Lambda) Psi^* over a sorted list
// of theta values, with branches ordered by continuation from theta = 0.
struct ModeDecomp {
  int j = 1;
  int n = 0;
  std::vector<double> thetas;
  std::vector<double> lambda;  // mode-major, n per mode
  std::vector<cplx> psi;       // n x n column-major per mode

  double min_match_score = 1.0;    // worst continuation overlap
  double lipschitz_estimate = 0.0;  // max |d lambda| / |d theta| over adjacent modes
  double psi_continuity = 0.0;      // max ||d Psi||_max / |d theta| over adjacent modes
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(thetas.size()); }
  Eigen::Map<const RVec> eigenvalues(int i) const { return {lambda.data() + static_cast<std::size_t>(i) * n, n}; }
  Eigen::Map<const CMat> eigenvectors(int i) const {
    return {psi.data() + static_cast<std::size_t>(i) * n * n, n, n};
  }
  CMat reconstruct(int i) const;
};

// L_j(theta) = L(j omega, j kappa + theta).
CMat assemble_Lj(const SystemSpec& spec, const DispersionData& disp, int j, double theta);

// j in {1, 3, 5}; thetas sorted ascending. For j = 1 the kernel branch comes first
// (lambda_11(0) = 0), the others ascending at the anchor closest to theta = 0.
// A continuation overlap below 0.7 records a warning rather than failing.
ModeDecomp decompose_grid(const SystemSpec& spec, const DispersionData& disp, int j, const std::vector<double>& thetas);

// Lambda_{-j}(theta) = -Lambda_j(-theta), Psi_{-j}(theta) = -conj(Psi_j(-theta)).
ModeDecomp negative_harmonic(const ModeDecomp& decomp);

struct AssumptionReport {
  int kernel_dim = 0;
  double kernel_second_singular = 0.0;
  double sigma_min_L3 = 0.0;
  double sigma_min_L5 = 0.0;
  double det_L3 = 0.0;  // real since L is Hermitian
  double det_L5 = 0.0;
  double lipschitz_estimate = 0.0;
  double lipschitz_weyl_bound = 0.0;  // ||A_1||_2
  bool kernel_ok = false;
  bool invertible_L3 = false;
  bool invertible_L5 = false;
  bool lipschitz_ok = false;
  bool passed() const { return kernel_ok && invertible_L3 && invertible_L5 && lipschitz_ok; }
};

AssumptionReport check_assumptions(const SystemSpec& spec, const DispersionData& disp);

struct NonResonanceReport {
  RVec lambda3;
  RVec lambda5;
  double gap = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

NonResonanceReport check_nonresonance(const SystemSpec& spec, const DispersionData& disp);
NonResonanceReport check_nonresonance(const RVec& lambda3, const RVec& lambda5);

}  // namespace envelope
