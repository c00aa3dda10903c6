#pragma once

#include <memory>
#include <vector>

#include "envelope/eigen_toolkit.hpp"
#include "envelope/index_set.hpp"
#include "envelope/spectral.hpp"
#include "envelope/system_model.hpp"

namespace envelope {

// Everything that fixes the physical problem; immutable and shared between workers.
struct Problem {
  SystemSpec spec;
  DispersionData disp;
  EnvelopeProfile profile;
};

enum class ReferenceScheme { strang, lawson_rk4 };

struct SimConfig {
  std::shared_ptr<const Problem> problem;
  double epsilon = 0.1;
  double t_end_slow = 0.5;
  double h_ref = 0.005;  // physical time
  double h_env = 0.5 / 2000;  // slow time; physical step is h_env / epsilon
  // Cap on the phase t Lambda / eps advanced per envelope step (radians); 0 disables.
  double max_phase_step = 0.35;
  Variant variant = Variant::j3;
  Grid env_grid;
  Grid ref_grid;
  int snapshots = 16;
  ReferenceScheme reference_scheme = ReferenceScheme::lawson_rk4;
  bool explicit_negatives = false;  // evolve the -j equations too (consistency checks)
  double blowup_factor = 10.0;
  Exec exec = Exec::parallel;

  // Carrier mode kappa / (epsilon dk); throws CommensurabilityError unless integral.
  int carrier_mode() const;
  // Physical horizon t_end_slow / epsilon.
  double t_end() const { return t_end_slow / epsilon; }
  void validate() const;
};

struct GridOptions {
  double length = 64.0 * kPi;
  int envelope_modes = 512;
  int reference_harmonics = 5;  // highest carrier harmonic resolved by the reference grid
};

// Nearest epsilon with kappa / epsilon an integer multiple of 2 pi / L.
double snap_epsilon(double kappa, double length, double epsilon);

// Smallest power-of-two reference grid resolving `harmonics` carrier harmonics plus the
// envelope band, with at least 8 points per carrier wavelength.
Grid reference_grid_for(double kappa, double epsilon, const GridOptions& opt);

// Envelope profile samples p(x_j) on `grid` and their transform (Nyquist mode zeroed).
SpectralField profile_spectrum(const Problem& problem, const Grid& grid);

struct ReferenceState {
  SpectralField u_hat;
  double t = 0.0;
};

class ReferenceSolver {
 public:
  explicit ReferenceSolver(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  ReferenceState initial_state() const;
  // One step of size h (physical time).
  void step(ReferenceState& s, double h);

 private:
  void prepare_flow(double tau);
  void linear_flow(SpectralField& u);
  void nonlinear_rhs(const SpectralField& u, SpectralField& out);

  SimConfig cfg_;
  int carrier_;
  double flow_tau_ = -1.0;
  std::vector<double> eig_lambda_;  // eigenvalues of A(k) - iE/eps per mode
  std::vector<cplx> eig_vectors_;
  std::vector<cplx> flow_;  // exp(-i tau H(k)) per mode
  FftCache fft_;
};

ReferenceState init_reference(const SimConfig& cfg);
void step_reference(ReferenceState& s, ReferenceSolver& solver);

struct EnvelopeState {
  std::vector<SpectralField> u;      // u_hat_j for the positive harmonics in order
  std::vector<SpectralField> u_neg;  // u_hat_{-j}, only with explicit_negatives
  double t = 0.0;
};

class EnvelopeSolver {
 public:
  explicit EnvelopeSolver(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const std::vector<int>& harmonics() const { return harmonics_; }
  // Decomposition of L_j(eps k) on the envelope modes (N + 1 symmetric thetas).
  const ModeDecomp& decomp(int j) const;
  const ModeDecomp& decomp_negative(int j) const;

  EnvelopeState initial_state() const;
  void step(EnvelopeState& s, double h);
  // Slow variables of every stored harmonic (negatives last, if explicit), and back.
  std::vector<SpectralField> state_to_z(const EnvelopeState& s) const;
  void z_to_state(const std::vector<SpectralField>& z, double t, EnvelopeState& s) const;
  // One RK4 step on the z-system from time t. Long runs should stay in z.
  void step_z(std::vector<SpectralField>& z, double t, double h);
  // Physical step: h_env / eps, shortened to honour max_phase_step.
  double physical_step() const;
  // Largest |Lambda_j| over the envelope modes.
  double lambda_max() const { return lambda_max_; }

  // z_j(t) = exp(i t Lambda_j / eps) Psi_j^* u_hat_j, for a positive or (debug) negative harmonic.
  SpectralField to_z(const SpectralField& u_hat, int j, double t) const;
  SpectralField from_z(const SpectralField& z, int j, double t) const;

  // sum_{#J = target} T(u_j1, u_j2, u_j3) in Fourier space for each target.
  std::vector<SpectralField> nonlinear_sums(const EnvelopeState& s, const std::vector<int>& targets);
  // One T-product per triple, for residual bookkeeping.
  SpectralField nonlinear_term(const EnvelopeState& s, const IndexTriple& J);

 private:
  struct Harmonic {
    int j;
    ModeDecomp decomp;
    std::vector<double> lambda;  // first N modes
    std::vector<cplx> psi;
    std::vector<cplx> psi_adj;
  };
  const Harmonic& harmonic(int j) const;
  void physical_sources(const EnvelopeState& s, std::vector<PhysicalField>& phys);
  std::vector<TripleTerm> terms_for(int target) const;
  int source_index(int j) const;
  void rhs(double t, const std::vector<SpectralField>& z, std::vector<SpectralField>& dz);

  SimConfig cfg_;
  std::vector<int> harmonics_;
  std::vector<int> signed_;
  std::vector<Harmonic> pos_;
  std::vector<Harmonic> neg_;
  bool symmetric_ = false;  // permutations of a triple share one evaluation
  double lambda_max_ = 0.0;
  FftCache fft_;
};

EnvelopeState init_envelope(const SimConfig& cfg);
void step_envelope(EnvelopeState& s, EnvelopeSolver& solver);

template <class State>
struct Trajectory {
  std::vector<double> slow_times;
  std::vector<State> states;
  long steps = 0;
};

using ReferenceTrajectory = Trajectory<ReferenceState>;
using EnvelopeTrajectory = Trajectory<EnvelopeState>;

// Integrates to t_end_slow / epsilon, recording states at the slow times
// i * t_end_slow / snapshots. Step sizes are shrunk so every interval is a whole number of steps.
ReferenceTrajectory simulate_reference(const SimConfig& cfg);
EnvelopeTrajectory simulate_envelope(const SimConfig& cfg);

// Steps per snapshot interval for the given physical step.
long steps_per_interval(const SimConfig& cfg, double physical_step);

}  // namespace envelope
