#include "envelope/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace envelope {

namespace {

void axpy(SpectralField& y, cplx a, const SpectralField& x) {
  auto yd = y.data();
  auto xd = x.data();
  for (std::size_t q = 0; q < yd.size(); ++q) yd[q] += a * xd[q];
}

std::vector<double> symmetric_thetas(const Grid& g, double epsilon) {
  std::vector<double> th(static_cast<std::size_t>(g.N) + 1);
  for (int i = 0; i <= g.N; ++i) th[i] = epsilon * g.dk() * (i - g.N / 2);
  return th;
}

double total_wiener(const std::vector<SpectralField>& fs) {
  double s = 0.0;
  for (const auto& f : fs) s += wiener_norm(f);
  return s;
}

}  // namespace

EnvelopeSolver::EnvelopeSolver(SimConfig cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.problem) throw ValidationError("config: no problem attached");
  if (!(cfg_.epsilon > 0.0 && cfg_.epsilon <= 1.0)) throw ValidationError("config: epsilon must lie in (0, 1]");
  if (!(cfg_.h_env > 0.0)) throw ValidationError("config: step sizes must be positive");
  if (!(cfg_.max_phase_step >= 0.0)) throw ValidationError("config: max_phase_step must be >= 0");
  harmonics_ = positive_harmonics(cfg_.variant);
  signed_ = signed_harmonics(cfg_.variant);
  const Problem& pb = *cfg_.problem;
  symmetric_ = pb.spec.T.is_symmetric();
  const Grid& g = cfg_.env_grid;
  const int n = pb.spec.n;
  const std::vector<double> thetas = symmetric_thetas(g, cfg_.epsilon);

  auto make = [&](ModeDecomp d) {
    Harmonic h{d.j, std::move(d), {}, {}, {}};
    h.lambda.assign(h.decomp.lambda.begin(), h.decomp.lambda.begin() + static_cast<std::ptrdiff_t>(g.N) * n);
    h.psi.assign(h.decomp.psi.begin(), h.decomp.psi.begin() + static_cast<std::ptrdiff_t>(g.N) * n * n);
    h.psi_adj.resize(h.psi.size());
    for (int i = 0; i < g.N; ++i) {
      Eigen::Map<const CMat> P(h.psi.data() + static_cast<std::size_t>(i) * n * n, n, n);
      Eigen::Map<CMat>(h.psi_adj.data() + static_cast<std::size_t>(i) * n * n, n, n) = P.adjoint();
    }
    return h;
  };
  for (int j : harmonics_) {
    pos_.push_back(make(decompose_grid(pb.spec, pb.disp, j, thetas)));
    neg_.push_back(make(negative_harmonic(pos_.back().decomp)));
    for (double l : pos_.back().lambda) lambda_max_ = std::max(lambda_max_, std::abs(l));
  }
}

double EnvelopeSolver::physical_step() const {
  const double h = cfg_.h_env / cfg_.epsilon;
  if (cfg_.max_phase_step <= 0.0 || lambda_max_ == 0.0) return h;
  return std::min(h, cfg_.max_phase_step * cfg_.epsilon / lambda_max_);
}

const EnvelopeSolver::Harmonic& EnvelopeSolver::harmonic(int j) const {
  const auto& list = j > 0 ? pos_ : neg_;
  for (const auto& h : list) {
    if (h.j == j) return h;
  }
  std::ostringstream os;
  os << "envelope solver: no decomposition for harmonic " << j;
  throw ValidationError(os.str());
}

const ModeDecomp& EnvelopeSolver::decomp(int j) const { return harmonic(j).decomp; }
const ModeDecomp& EnvelopeSolver::decomp_negative(int j) const { return harmonic(-std::abs(j)).decomp; }

SpectralField EnvelopeSolver::to_z(const SpectralField& u_hat, int j, double t) const {
  if (!(u_hat.grid() == cfg_.env_grid)) throw ValidationError("envelope solver: grid mismatch");
  const Harmonic& h = harmonic(j);
  SpectralField z = u_hat;
  kernels::apply_per_mode(h.psi_adj, z.n(), z.data(), cfg_.exec);
  kernels::apply_phases(h.lambda, t / cfg_.epsilon, z.data(), false, cfg_.exec);
  z.set_rep(Representation::z);
  return z;
}

SpectralField EnvelopeSolver::from_z(const SpectralField& z, int j, double t) const {
  if (!(z.grid() == cfg_.env_grid)) throw ValidationError("envelope solver: grid mismatch");
  const Harmonic& h = harmonic(j);
  SpectralField u = z;
  kernels::apply_phases(h.lambda, t / cfg_.epsilon, u.data(), true, cfg_.exec);
  kernels::apply_per_mode(h.psi, u.n(), u.data(), cfg_.exec);
  u.set_rep(Representation::u_hat);
  return u;
}

EnvelopeState EnvelopeSolver::initial_state() const {
  const Problem& pb = *cfg_.problem;
  pb.profile.validate(pb.disp, cfg_.env_grid.L);
  const Grid& g = cfg_.env_grid;
  EnvelopeState s;
  for (std::size_t q = 0; q < harmonics_.size(); ++q) s.u.emplace_back(g, pb.spec.n);
  s.u[0] = profile_spectrum(pb, g);
  if (cfg_.explicit_negatives) {
    for (std::size_t q = 0; q < harmonics_.size(); ++q) s.u_neg.emplace_back(g, pb.spec.n);
    for (int i = 1; i < g.N; ++i) s.u_neg[0].at(g.index(-g.mode(i))) = s.u[0].at(i).conjugate();
  }
  return s;
}

int EnvelopeSolver::source_index(int j) const {
  const int a = std::abs(j);
  const auto it = std::find(harmonics_.begin(), harmonics_.end(), a);
  if (it == harmonics_.end()) throw ValidationError("envelope solver: harmonic outside the index set");
  const int pos = static_cast<int>(it - harmonics_.begin());
  return (j < 0 && cfg_.explicit_negatives) ? static_cast<int>(harmonics_.size()) + pos : pos;
}

std::vector<TripleTerm> EnvelopeSolver::terms_for(int target) const {
  std::vector<TripleTerm> terms;
  std::vector<IndexTriple> seen;
  for (const IndexTriple& J : enumerate_index_set(target, signed_)) {
    IndexTriple key = J;
    if (symmetric_) {
      std::sort(key.begin(), key.end());
      const auto it = std::find(seen.begin(), seen.end(), key);
      if (it != seen.end()) {
        terms[it - seen.begin()].weight += 1.0;
        continue;
      }
    }
    seen.push_back(key);
    TripleTerm t{};
    for (int q = 0; q < 3; ++q) {
      t.src[q] = source_index(key[q]);
      t.conj[q] = key[q] < 0 && !cfg_.explicit_negatives;
    }
    t.weight = 1.0;
    terms.push_back(t);
  }
  return terms;
}

void EnvelopeSolver::physical_sources(const EnvelopeState& s, std::vector<PhysicalField>& phys) {
  const int M = 2 * cfg_.env_grid.N;
  phys.clear();
  for (const auto& f : s.u) phys.push_back(inverse_fft(f, M, fft_));
  if (cfg_.explicit_negatives) {
    for (const auto& f : s.u_neg) phys.push_back(inverse_fft(f, M, fft_));
  }
}

std::vector<SpectralField> EnvelopeSolver::nonlinear_sums(const EnvelopeState& s, const std::vector<int>& targets) {
  const SystemSpec& spec = cfg_.problem->spec;
  const int M = 2 * cfg_.env_grid.N;
  std::vector<SpectralField> out;
  if (spec.T.is_zero()) {
    for (std::size_t q = 0; q < targets.size(); ++q) out.emplace_back(cfg_.env_grid, spec.n);
    return out;
  }
  std::vector<PhysicalField> phys;
  physical_sources(s, phys);
  std::vector<const cplx*> src;
  for (const auto& p : phys) src.push_back(p.values.data());
  PhysicalField acc(spec.n, M);
  for (int target : targets) {
    std::fill(acc.values.begin(), acc.values.end(), cplx(0.0));
    const std::vector<TripleTerm> terms = terms_for(target);
    kernels::accumulate_trilinear(spec.T, spec.n, M, src, terms, acc.values.data(), cfg_.exec);
    SpectralField f = forward_fft(acc, cfg_.env_grid, fft_);
    f.at(0).setZero();
    out.push_back(std::move(f));
  }
  return out;
}

SpectralField EnvelopeSolver::nonlinear_term(const EnvelopeState& s, const IndexTriple& J) {
  const SystemSpec& spec = cfg_.problem->spec;
  const int M = 2 * cfg_.env_grid.N;
  std::vector<PhysicalField> phys;
  physical_sources(s, phys);
  std::vector<const cplx*> src;
  for (const auto& p : phys) src.push_back(p.values.data());
  TripleTerm t{};
  for (int q = 0; q < 3; ++q) {
    t.src[q] = source_index(J[q]);
    t.conj[q] = J[q] < 0 && !cfg_.explicit_negatives;
  }
  PhysicalField acc(spec.n, M);
  kernels::accumulate_trilinear(spec.T, spec.n, M, src, std::span<const TripleTerm>(&t, 1), acc.values.data(),
                                cfg_.exec);
  SpectralField f = forward_fft(acc, cfg_.env_grid, fft_);
  f.at(0).setZero();
  return f;
}

// z is laid out as the positive harmonics followed (in debug mode) by the negatives.
void EnvelopeSolver::rhs(double t, const std::vector<SpectralField>& z, std::vector<SpectralField>& dz) {
  const std::size_t H = harmonics_.size();
  EnvelopeState s;
  s.t = t;
  std::vector<int> targets;
  for (std::size_t q = 0; q < H; ++q) {
    s.u.push_back(from_z(z[q], harmonics_[q], t));
    targets.push_back(harmonics_[q]);
  }
  if (cfg_.explicit_negatives) {
    for (std::size_t q = 0; q < H; ++q) {
      s.u_neg.push_back(from_z(z[H + q], -harmonics_[q], t));
      targets.push_back(-harmonics_[q]);
    }
  }
  std::vector<SpectralField> sums = nonlinear_sums(s, targets);
  dz.resize(sums.size());
  for (std::size_t q = 0; q < sums.size(); ++q) {
    dz[q] = to_z(sums[q], targets[q], t);
    dz[q] *= cfg_.epsilon;
  }
}

std::vector<SpectralField> EnvelopeSolver::state_to_z(const EnvelopeState& s) const {
  const std::size_t H = harmonics_.size();
  std::vector<SpectralField> z;
  for (std::size_t q = 0; q < H; ++q) z.push_back(to_z(s.u[q], harmonics_[q], s.t));
  if (cfg_.explicit_negatives) {
    for (std::size_t q = 0; q < H; ++q) z.push_back(to_z(s.u_neg[q], -harmonics_[q], s.t));
  }
  return z;
}

void EnvelopeSolver::z_to_state(const std::vector<SpectralField>& z, double t, EnvelopeState& s) const {
  const std::size_t H = harmonics_.size();
  s.t = t;
  for (std::size_t q = 0; q < H; ++q) s.u[q] = from_z(z[q], harmonics_[q], t);
  if (cfg_.explicit_negatives) {
    for (std::size_t q = 0; q < H; ++q) s.u_neg[q] = from_z(z[H + q], -harmonics_[q], t);
  }
}

void EnvelopeSolver::step_z(std::vector<SpectralField>& z0, double t, double h) {
  if (cfg_.problem->spec.T.is_zero()) return;
  std::vector<SpectralField> k1, k2, k3, k4;
  auto stage = [&](const std::vector<SpectralField>& k, double a) {
    std::vector<SpectralField> y = z0;
    for (std::size_t q = 0; q < y.size(); ++q) axpy(y[q], a, k[q]);
    return y;
  };
  rhs(t, z0, k1);
  rhs(t + 0.5 * h, stage(k1, 0.5 * h), k2);
  rhs(t + 0.5 * h, stage(k2, 0.5 * h), k3);
  rhs(t + h, stage(k3, h), k4);
  for (std::size_t q = 0; q < z0.size(); ++q) {
    axpy(z0[q], h / 6.0, k1[q]);
    axpy(z0[q], h / 3.0, k2[q]);
    axpy(z0[q], h / 3.0, k3[q]);
    axpy(z0[q], h / 6.0, k4[q]);
  }
}

void EnvelopeSolver::step(EnvelopeState& s, double h) {
  std::vector<SpectralField> z = state_to_z(s);
  step_z(z, s.t, h);
  z_to_state(z, s.t + h, s);
}

EnvelopeState init_envelope(const SimConfig& cfg) { return EnvelopeSolver(cfg).initial_state(); }

void step_envelope(EnvelopeState& s, EnvelopeSolver& solver) {
  solver.step(s, solver.physical_step());
}

EnvelopeTrajectory simulate_envelope(const SimConfig& cfg) {
  EnvelopeSolver solver(cfg);
  EnvelopeTrajectory traj;
  EnvelopeState s = solver.initial_state();
  traj.slow_times.push_back(0.0);
  traj.states.push_back(s);
  if (cfg.t_end_slow == 0.0) return traj;
  const long per = steps_per_interval(cfg, solver.physical_step());
  const double h = cfg.t_end() / cfg.snapshots / per;
  const double w0 = total_wiener(s.u);
  // Stay in z between snapshots and take times from the step counter: the
  // phases t Lambda / eps are large, so round trips through u_hat and a
  // summed clock both leak rounding into the slow variables.
  std::vector<SpectralField> z = solver.state_to_z(s);
  for (int snap = 1; snap <= cfg.snapshots; ++snap) {
    const double t0 = (snap - 1) * cfg.t_end() / cfg.snapshots;
    for (long q = 0; q < per; ++q) solver.step_z(z, t0 + q * h, h);
    traj.steps += per;
    solver.z_to_state(z, snap * cfg.t_end() / cfg.snapshots, s);
    const double w = total_wiener(s.u);
    if (!std::isfinite(w)) {
      std::ostringstream os;
      os << "envelope solver: non-finite value at t = " << s.t;
      throw NumericalBlowup(os.str());
    }
    // ||z_j|| = ||u_hat_j|| per mode, so the guard can use u_hat directly.
    if (w0 > 0.0 && w > cfg.blowup_factor * w0) {
      throw NumericalBlowup("envelope solver: norm exceeded the blow-up guard");
    }
    traj.slow_times.push_back(snap * cfg.t_end_slow / cfg.snapshots);
    traj.states.push_back(s);
  }
  return traj;
}

}  // namespace envelope
