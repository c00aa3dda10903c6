#pragma once

#include <vector>

#include "envelope/solvers.hpp"

namespace envelope {

struct DiagnosticsRecord {
  double epsilon = 0.0;
  double t = 0.0;  // slow time
  double err_W = 0.0;
  double err_Linf = 0.0;
  double u3_W = 0.0;
  double u3_W1 = 0.0;
  double u3_dmu = 0.0;
  double proj_perp_u1 = 0.0;
  double proj_perp_dmu = 0.0;
  double scaled_norm_z = 0.0;
  double residual_W = 0.0;        // triangle-inequality bound
  double residual_lowest = 0.0;   // lowest residual harmonic only (|j| = 5 for j3)
  double residual_exact = 0.0;    // W-norm of the assembled residual
  double dt_Pu1 = 0.0;            // sup so far of the analytic d/dt P_eps u_hat_1
};

// Spectrum of the ansatz sum_j e^{ij(kappa x - omega t)/eps} u_j + c.c. on `fine`.
SpectralField reconstruct_spectrum(const EnvelopeState& s, const SimConfig& cfg, const Grid& fine);
// Samples of the same on `points` nodes.
PhysicalField reconstruct(const EnvelopeState& s, const SimConfig& cfg, const Grid& fine, int points);

// Sample count for L-infinity evaluation: at least 8 nodes per wavelength of the highest harmonic.
int linf_points(const SimConfig& cfg, const Grid& fine);

struct ErrorNorms {
  double W = 0.0;
  double Linf = 0.0;
};

ErrorNorms error_norms(const ReferenceState& ref, const EnvelopeState& env, const SimConfig& cfg);

// P keeps the first component of a z-field; P_eps is the rank-one projector
// psi_11(eps k) psi_11^*(eps k) on u_hat_1 (first branch of the j = 1 decomposition).
SpectralField project_P(const SpectralField& z);
SpectralField project_P_perp(const SpectralField& z);
SpectralField project_Peps(const SpectralField& u1, const ModeDecomp& d1);
SpectralField project_Peps_perp(const SpectralField& u1, const ModeDecomp& d1);

// 2 |P z1| + (2/eps) |P-perp z1| + (2/eps) |z3|; z3 may be null (svea1).
double scaled_norm(const SpectralField& z1, const SpectralField* z3, double epsilon);

struct RefinedBounds {
  double u3_over_eps = 0.0;
  double u3_W1_over_eps = 0.0;
  double u3_dmu_over_eps = 0.0;
  double proj_perp_over_eps = 0.0;
  double proj_perp_dmu_over_eps = 0.0;
  double scaled_norm_initial = 0.0;
  double scaled_norm_max = 0.0;
  double initial_projection_constant = 0.0;  // |P-perp z1(0)| / (eps |grad p|_W)
};

RefinedBounds refined_bounds(const EnvelopeTrajectory& traj, EnvelopeSolver& solver);

// |d/dt P_eps u_hat_1|_{L1} from the right-hand side: -(i/eps) lambda_11 P_eps u_hat_1 + eps P_eps sum T.
double slow_derivative_norm(const EnvelopeState& s, EnvelopeSolver& solver);

struct SlowDerivative {
  double analytic = 0.0;           // max over snapshots
  double finite_difference = 0.0;  // max over snapshot pairs
};

SlowDerivative slow_derivative_bound(const EnvelopeTrajectory& traj, EnvelopeSolver& solver);

struct ResidualNorms {
  double bound = 0.0;
  double lowest = 0.0;
  double exact = 0.0;
};

ResidualNorms residual_norm(const EnvelopeState& s, EnvelopeSolver& solver);

// Full per-snapshot record set for matched trajectories.
std::vector<DiagnosticsRecord> diagnose(const ReferenceTrajectory& ref, const EnvelopeTrajectory& env,
                                        EnvelopeSolver& solver);

}  // namespace envelope
