#pragma once

#include <span>
#include <vector>

#include "envelope/system_model.hpp"
#include "envelope/types.hpp"

// Data-parallel inner loops. Every kernel has a serial reference version and
// an OpenMP version; both produce bitwise-identical results (no reductions).
namespace envelope {

enum class Exec { serial, parallel };

// weight * T(s[src0]^(c0), s[src1]^(c1), s[src2]^(c2)), ^ = optional conjugation.
struct TripleTerm {
  int src[3];
  bool conj[3];
  double weight = 1.0;
};

namespace kernels {

inline constexpr int kMaxN = 16;  // largest supported state dimension

// out[:, j] = sum_terms weight * T(...)(x_j) for every sample j. Sources and out are
// component-major arrays of n * points values.
void accumulate_trilinear(const Trilinear& T, int n, int points, std::span<const cplx* const> sources,
                          std::span<const TripleTerm> terms, cplx* out, Exec exec);

// v_i <- M_i v_i for mode-major vectors and n x n matrices stored column-major.
void apply_per_mode(std::span<const cplx> mats, int n, std::span<cplx> v, Exec exec);

// v_i <- exp(i * t * lambda_i / eps) (diagonal phase), lambda mode-major.
void apply_phases(std::span<const double> lambda, double t_over_eps, std::span<cplx> v, bool conjugate, Exec exec);

// One classical RK4 step of u' = scale * T(u, u, u) at every sample (component-major).
void rk4_pointwise(const Trilinear& T, int n, int points, double h, double scale, cplx* u, Exec exec);

// u <- scale * T(u, u, u) at every sample, in place.
void cubic_pointwise(const Trilinear& T, int n, int points, double scale, cplx* u, Exec exec);

namespace serial {
void accumulate_trilinear(const Trilinear& T, int n, int points, std::span<const cplx* const> sources,
                          std::span<const TripleTerm> terms, cplx* out);
void cubic_pointwise(const Trilinear& T, int n, int points, double scale, cplx* u);
void apply_per_mode(std::span<const cplx> mats, int n, std::span<cplx> v);
void apply_phases(std::span<const double> lambda, double t_over_eps, std::span<cplx> v, bool conjugate);
void rk4_pointwise(const Trilinear& T, int n, int points, double h, double scale, cplx* u);
}  // namespace serial

namespace omp {
void accumulate_trilinear(const Trilinear& T, int n, int points, std::span<const cplx* const> sources,
                          std::span<const TripleTerm> terms, cplx* out);
void cubic_pointwise(const Trilinear& T, int n, int points, double scale, cplx* u);
void apply_per_mode(std::span<const cplx> mats, int n, std::span<cplx> v);
void apply_phases(std::span<const double> lambda, double t_over_eps, std::span<cplx> v, bool conjugate);
void rk4_pointwise(const Trilinear& T, int n, int points, double h, double scale, cplx* u);
}  // namespace omp

}  // namespace kernels
}  // namespace envelope
