#include "envelope/solvers.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace envelope {

int SimConfig::carrier_mode() const {
  const double ratio = problem->disp.kappa / (epsilon * ref_grid.dk());
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    std::ostringstream os;
    os.precision(17);
    os << "kappa / epsilon = " << problem->disp.kappa / epsilon << " is not a multiple of dk = " << ref_grid.dk()
       << " (nearest commensurable epsilon: " << snap_epsilon(problem->disp.kappa, ref_grid.L, epsilon) << ")";
    throw CommensurabilityError(os.str());
  }
  return static_cast<int>(m);
}

void SimConfig::validate() const {
  if (!problem) throw ValidationError("config: no problem attached");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("config: epsilon must lie in (0, 1]");
  if (!(t_end_slow >= 0.0)) throw ValidationError("config: t_end_slow must be >= 0");
  if (!(h_ref > 0.0) || !(h_env > 0.0)) throw ValidationError("config: step sizes must be positive");
  if (snapshots < 1) throw ValidationError("config: need at least one snapshot interval");
  if (env_grid.L != ref_grid.L) throw ValidationError("config: envelope and reference grids need the same torus length");
  const int mc = carrier_mode();
  if (ref_grid.N < 8 * std::abs(mc)) {
    throw UnderResolvedError("config: reference grid has fewer than 8 points per carrier wavelength");
  }
  if (std::abs(mc) + env_grid.N / 2 >= ref_grid.N / 2) {
    throw UnderResolvedError("config: reference grid does not contain the shifted envelope band");
  }
}

double snap_epsilon(double kappa, double length, double epsilon) {
  const double dk = 2.0 * kPi / length;
  const double m = std::max(1.0, std::round(std::abs(kappa) / (epsilon * dk)));
  return std::abs(kappa) / (m * dk);
}

Grid reference_grid_for(double kappa, double epsilon, const GridOptions& opt) {
  const double dk = 2.0 * kPi / opt.length;
  const double mc = std::abs(kappa) / (epsilon * dk);
  const double need_half = opt.reference_harmonics * mc + opt.envelope_modes / 2.0 + 1.0;
  int N = 2;
  while (N / 2 < need_half || N < 8 * mc) N *= 2;
  return Grid(opt.length, N);
}

SpectralField profile_spectrum(const Problem& problem, const Grid& grid) {
  const EnvelopeProfile& p = problem.profile;
  const int n = problem.spec.n;
  PhysicalField samples(n, grid.N);
  if (p.kind == EnvelopeProfile::Kind::sampled && static_cast<int>(p.samples.size()) != grid.N) {
    throw ValidationError("profile: sample count does not match the envelope grid");
  }
  for (int j = 0; j < grid.N; ++j) {
    const double a = p.kind == EnvelopeProfile::Kind::sampled ? p.samples[j] : p.scalar(grid.x(j));
    for (int c = 0; c < n; ++c) samples.component(c)[j] = a * p.polarization[c];
  }
  SpectralField out = forward_fft(samples, grid);
  out.at(0).setZero();
  return out;
}

ReferenceSolver::ReferenceSolver(SimConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  carrier_ = cfg_.carrier_mode();
  const SystemSpec& spec = cfg_.problem->spec;
  const int n = spec.n;
  const Grid& g = cfg_.ref_grid;
  eig_lambda_.resize(static_cast<std::size_t>(g.N) * n);
  eig_vectors_.resize(static_cast<std::size_t>(g.N) * n * n);
  const CMat iE = kI * spec.E.cast<cplx>() / cfg_.epsilon;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.N; ++i) {
    const CMat H = (g.k(i) * spec.A[0]).cast<cplx>() - iE;
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    std::copy(es.eigenvalues().data(), es.eigenvalues().data() + n, eig_lambda_.begin() + static_cast<std::ptrdiff_t>(i) * n);
    std::copy(es.eigenvectors().data(), es.eigenvectors().data() + n * n,
              eig_vectors_.begin() + static_cast<std::ptrdiff_t>(i) * n * n);
  }
}

void ReferenceSolver::prepare_flow(double tau) {
  if (tau == flow_tau_) return;
  const int n = cfg_.problem->spec.n;
  const int N = cfg_.ref_grid.N;
  flow_.resize(static_cast<std::size_t>(N) * n * n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < N; ++i) {
    Eigen::Map<const CMat> V(eig_vectors_.data() + static_cast<std::size_t>(i) * n * n, n, n);
    CVec ph(n);
    for (int l = 0; l < n; ++l) {
      const double a = -tau * eig_lambda_[static_cast<std::size_t>(i) * n + l];
      ph[l] = cplx(std::cos(a), std::sin(a));
    }
    Eigen::Map<CMat> F(flow_.data() + static_cast<std::size_t>(i) * n * n, n, n);
    F = V * ph.asDiagonal() * V.adjoint();
  }
  flow_tau_ = tau;
}

void ReferenceSolver::linear_flow(SpectralField& u) {
  kernels::apply_per_mode(flow_, u.n(), u.data(), cfg_.exec);
}

void ReferenceSolver::nonlinear_rhs(const SpectralField& u, SpectralField& out) {
  const SystemSpec& spec = cfg_.problem->spec;
  const int M = 2 * u.grid().N;
  // The solution is real, so components travel through the FFTs in pairs.
  PhysicalField phys = inverse_fft_real(u, M, fft_);
  kernels::cubic_pointwise(spec.T, spec.n, M, cfg_.epsilon, phys.values.data(), cfg_.exec);
  out = forward_fft_real(phys, u.grid(), fft_);
}

ReferenceState ReferenceSolver::initial_state() const {
  const Problem& pb = *cfg_.problem;
  const SpectralField p = profile_spectrum(pb, cfg_.env_grid);
  const Grid& g = cfg_.ref_grid;
  ReferenceState s{SpectralField(g, pb.spec.n), 0.0};
  for (int i = 0; i < p.size(); ++i) {
    const int m = p.grid().mode(i);
    s.u_hat.at(g.index(m + carrier_)) += p.at(i);
    // c.c. term: F(conj f)(k) = conj(f_hat(-k)), shifted to -kappa/eps.
    s.u_hat.at(g.index(-m - carrier_)) += p.at(i).conjugate();
  }
  return s;
}

void ReferenceSolver::step(ReferenceState& s, double h) {
  const SystemSpec& spec = cfg_.problem->spec;
  if (cfg_.reference_scheme == ReferenceScheme::strang) {
    prepare_flow(0.5 * h);
    linear_flow(s.u_hat);
    if (!spec.T.is_zero()) {
      const int M = 2 * s.u_hat.grid().N;
      PhysicalField phys = inverse_fft(s.u_hat, M, fft_);
      kernels::rk4_pointwise(spec.T, spec.n, M, h, cfg_.epsilon, phys.values.data(), cfg_.exec);
      s.u_hat = forward_fft(phys, s.u_hat.grid(), fft_);
    }
    linear_flow(s.u_hat);
  } else {
    // Lawson RK4 with E = exp(-i H h/2).
    prepare_flow(0.5 * h);
    if (spec.T.is_zero()) {
      linear_flow(s.u_hat);
      linear_flow(s.u_hat);
    } else {
      const SpectralField& u0 = s.u_hat;
      SpectralField k1, k2, k3, k4;
      nonlinear_rhs(u0, k1);
      SpectralField a = u0;
      for (int q = 0; q < static_cast<int>(a.data().size()); ++q) a.data()[q] += 0.5 * h * k1.data()[q];
      linear_flow(a);
      nonlinear_rhs(a, k2);
      SpectralField eu = u0;
      linear_flow(eu);
      SpectralField b = eu;
      for (int q = 0; q < static_cast<int>(b.data().size()); ++q) b.data()[q] += 0.5 * h * k2.data()[q];
      nonlinear_rhs(b, k3);
      // c = E (E u0 + h k3)
      SpectralField c = eu;
      for (int q = 0; q < static_cast<int>(c.data().size()); ++q) c.data()[q] += h * k3.data()[q];
      linear_flow(c);
      nonlinear_rhs(c, k4);
      // u1 = E (E (u0 + h/6 k1) + h/3 (k2 + k3)) + h/6 k4
      SpectralField acc = u0;
      for (int q = 0; q < static_cast<int>(acc.data().size()); ++q) acc.data()[q] += (h / 6.0) * k1.data()[q];
      linear_flow(acc);
      for (int q = 0; q < static_cast<int>(acc.data().size()); ++q) {
        acc.data()[q] += (h / 3.0) * (k2.data()[q] + k3.data()[q]);
      }
      linear_flow(acc);
      for (int q = 0; q < static_cast<int>(acc.data().size()); ++q) acc.data()[q] += (h / 6.0) * k4.data()[q];
      s.u_hat = std::move(acc);
    }
  }
  s.t += h;
}

ReferenceState init_reference(const SimConfig& cfg) { return ReferenceSolver(cfg).initial_state(); }

void step_reference(ReferenceState& s, ReferenceSolver& solver) { solver.step(s, solver.config().h_ref); }

long steps_per_interval(const SimConfig& cfg, double physical_step) {
  const double interval = cfg.t_end() / cfg.snapshots;
  if (interval == 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(interval / physical_step - 1e-9)));
}

namespace {

void check_finite(const SpectralField& f, const char* who, double t) {
  for (const cplx& c : f.data()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream os;
      os << who << ": non-finite value at t = " << t;
      throw NumericalBlowup(os.str());
    }
  }
}

}  // namespace

ReferenceTrajectory simulate_reference(const SimConfig& cfg) {
  ReferenceSolver solver(cfg);
  ReferenceTrajectory traj;
  ReferenceState s = solver.initial_state();
  traj.slow_times.push_back(0.0);
  traj.states.push_back(s);
  if (cfg.t_end_slow == 0.0) return traj;
  const long per = steps_per_interval(cfg, cfg.h_ref);
  const double h = cfg.t_end() / cfg.snapshots / per;
  const double w0 = wiener_norm(s.u_hat);
  for (int snap = 1; snap <= cfg.snapshots; ++snap) {
    for (long q = 0; q < per; ++q) solver.step(s, h);
    traj.steps += per;
    s.t = snap * cfg.t_end() / cfg.snapshots;
    check_finite(s.u_hat, "reference solver", s.t);
    if (w0 > 0.0 && wiener_norm(s.u_hat) > cfg.blowup_factor * w0) {
      throw NumericalBlowup("reference solver: Wiener norm exceeded the blow-up guard");
    }
    traj.slow_times.push_back(snap * cfg.t_end_slow / cfg.snapshots);
    traj.states.push_back(s);
  }
  return traj;
}

}  // namespace envelope
