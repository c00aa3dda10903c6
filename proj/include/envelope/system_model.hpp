#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "envelope/types.hpp"

namespace envelope {

// Complex trilinear map C^n x C^n x C^n -> C^n.
//
// Either a dense coefficient tensor T[i][j][k][l] (out index i first) or an
// arbitrary callable. The callable is required to be trilinear over C with
// real coefficients, i.e. the complex extension of a real trilinear map.
class Trilinear {
 public:
  using Fn = std::function<void(const cplx* a, const cplx* b, const cplx* c, cplx* out)>;
  // Optional fast path for the diagonal u -> T(u, u, u).
  using CubicFn = std::function<void(const cplx* u, cplx* out)>;

  Trilinear() = default;
  static Trilinear from_tensor(int n, std::vector<double> coeffs);
  static Trilinear from_callable(int n, Fn fn, CubicFn cubic = {});
  static Trilinear zero(int n);

  int dim() const { return n_; }
  bool is_zero() const { return zero_; }

  void operator()(const cplx* a, const cplx* b, const cplx* c, cplx* out) const { fn_(a, b, c, out); }
  CVec operator()(const CVec& a, const CVec& b, const CVec& c) const;
  void cubic(const cplx* u, cplx* out) const {
    if (cubic_) {
      cubic_(u, out);
    } else {
      fn_(u, u, u, out);
    }
  }

  // Dense coefficients, recovered from basis evaluations for callables.
  std::vector<double> coefficients() const;

  // T(a, b, c) invariant under permutations of its arguments.
  bool is_symmetric(double rel_tol = 1e-14) const;

  // Rigorous C_T with |T(a,b,c)| <= C_T |a| |b| |c|: Frobenius norm of the
  // n x n^3 flattening.
  double norm_bound() const;

  // Lower estimate of the sharp constant from random unit triples.
  double sampled_norm(int samples, unsigned seed) const;

 private:
  int n_ = 0;
  bool zero_ = false;
  Fn fn_;
  CubicFn cubic_;
};

struct SystemSpec {
  int d = 1;
  int n = 0;
  std::vector<RMat> A;  // d symmetric n x n matrices
  RMat E;               // skew-symmetric
  Trilinear T;
  std::string name;

  // Throws ValidationError on the first violated invariant.
  void validate() const;
};

struct BranchSelector {
  enum class Kind { smallest_positive, index };
  Kind kind = Kind::smallest_positive;
  int index = 0;  // eigenvalue index in ascending order, for Kind::index
};

struct DispersionData {
  double kappa = 0.0;
  double omega = 0.0;
  int eig_index = 0;  // position of omega in the ascending spectrum of A(kappa) - iE
  CVec kernel_vec;    // unit vector spanning ker L(omega, kappa)
  double second_singular_value = 0.0;
};

RMat assemble_A(const SystemSpec& spec, std::span<const double> beta);
CMat assemble_L(const SystemSpec& spec, double alpha, std::span<const double> beta);
CMat assemble_L(const SystemSpec& spec, double alpha, double beta);
CVec eval_T(const SystemSpec& spec, const CVec& a, const CVec& b, const CVec& c);

SystemSpec builtin_klein_gordon(double nu, const RMat& M);
SystemSpec builtin_maxwell_lorentz_1d();

// Singular values of L(alpha, beta), ascending.
RVec singular_values_ascending(const CMat& L);

// Number of singular values below rel_tol * sigma_max.
int numerical_kernel_dimension(const CMat& L, double rel_tol = 1e-8);

DispersionData find_dispersion(const SystemSpec& spec, double kappa, BranchSelector selector = {});

// Rotate v so that the first component of (near-)maximal modulus is real positive.
// Components within 1e-8 relative of the maximum count as ties; the lowest index wins.
void fix_phase(Eigen::Ref<CVec> v);
int phase_pivot(const CVec& v);

struct EnvelopeProfile {
  enum class Kind { gaussian, sampled };
  Kind kind = Kind::gaussian;
  double amplitude = 0.5;
  double center = 0.0;
  double width = 2.0;
  CVec polarization;
  // Scalar envelope samples on x_j = -L/2 + j L / N when kind == sampled.
  std::vector<double> samples;

  // Scalar envelope a(x); p(x) = a(x) * polarization.
  double scalar(double x) const;

  // Checks p(x) in span{kernel_vec} (polarization unit and parallel to
  // kernel_vec) and the decay |p(+-L/2)| / max|p| <= 1e-12.
  void validate(const DispersionData& disp, double torus_length) const;
};

}  // namespace envelope
