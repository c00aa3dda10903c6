#include "envelope/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace envelope {

namespace {

cplx carrier_phase(int j, double omega, double t, double epsilon) {
  const double a = -j * omega * t / epsilon;
  return {std::cos(a), std::sin(a)};
}

int harmonic_slot(const std::vector<int>& hs, int j) {
  const auto it = std::find(hs.begin(), hs.end(), j);
  return it == hs.end() ? -1 : static_cast<int>(it - hs.begin());
}

// Adds phase * f (centered at j * carrier) and its conjugate mirror at -j * carrier.
void add_harmonic(SpectralField& out, const SpectralField& f, int j, int carrier, cplx phase) {
  const Grid& fine = out.grid();
  const Grid& g = f.grid();
  for (int i = 0; i < g.N; ++i) {
    const int m = g.mode(i);
    const int gp = m + j * carrier, gm = -m - j * carrier;
    if (!fine.contains(gp) || !fine.contains(gm)) {
      if (f.at(i).isZero(0.0)) continue;
      throw UnderResolvedError("reconstruct: fine grid does not contain harmonic " + std::to_string(j));
    }
    const CVec v = phase * f.at(i);
    out.at(fine.index(gp)) += v;
    out.at(fine.index(gm)) += v.conjugate();
  }
}

}  // namespace

SpectralField reconstruct_spectrum(const EnvelopeState& s, const SimConfig& cfg, const Grid& fine) {
  const Problem& pb = *cfg.problem;
  const std::vector<int> hs = positive_harmonics(cfg.variant);
  const int carrier = cfg.carrier_mode();
  SpectralField out(fine, pb.spec.n);
  for (std::size_t q = 0; q < hs.size(); ++q) {
    add_harmonic(out, s.u[q], hs[q], carrier, carrier_phase(hs[q], pb.disp.omega, s.t, cfg.epsilon));
  }
  return out;
}

PhysicalField reconstruct(const EnvelopeState& s, const SimConfig& cfg, const Grid& fine, int points) {
  FftCache cache;
  return inverse_fft(reconstruct_spectrum(s, cfg, fine), points, cache);
}

int linf_points(const SimConfig& cfg, const Grid& fine) {
  const long need = 8L * std::max(max_harmonic(cfg.variant), 5) * std::abs(cfg.carrier_mode());
  int p = fine.N;
  while (p < need) p *= 2;
  return p;
}

ErrorNorms error_norms(const ReferenceState& ref, const EnvelopeState& env, const SimConfig& cfg) {
  if (std::abs(ref.t - env.t) > 1e-9 * std::max(1.0, std::abs(ref.t))) {
    std::ostringstream os;
    os << "error_norms: time mismatch (" << ref.t << " vs " << env.t << ")";
    throw ValidationError(os.str());
  }
  SpectralField diff = ref.u_hat;
  diff -= reconstruct_spectrum(env, cfg, ref.u_hat.grid());
  ErrorNorms e;
  e.W = wiener_norm(diff);
  FftCache cache;
  const PhysicalField phys = inverse_fft(diff, linf_points(cfg, diff.grid()), cache);
  for (int j = 0; j < phys.points; ++j) e.Linf = std::max(e.Linf, phys.point(j).norm());
  return e;
}

SpectralField project_P(const SpectralField& z) {
  SpectralField out = z;
  for (int i = 0; i < out.size(); ++i) out.at(i).tail(out.n() - 1).setZero();
  return out;
}

SpectralField project_P_perp(const SpectralField& z) {
  SpectralField out = z;
  for (int i = 0; i < out.size(); ++i) out.at(i)[0] = 0.0;
  return out;
}

SpectralField project_Peps(const SpectralField& u1, const ModeDecomp& d1) {
  if (d1.size() < u1.size()) throw ValidationError("project_Peps: decomposition does not cover the grid");
  SpectralField out = u1;
  for (int i = 0; i < u1.size(); ++i) {
    const CVec psi = d1.eigenvectors(i).col(0);
    out.at(i) = psi * psi.dot(u1.at(i));
  }
  return out;
}

SpectralField project_Peps_perp(const SpectralField& u1, const ModeDecomp& d1) {
  SpectralField out = u1;
  out -= project_Peps(u1, d1);
  return out;
}

double scaled_norm(const SpectralField& z1, const SpectralField* z3, double epsilon) {
  double r = 2.0 * wiener_norm(project_P(z1)) + 2.0 / epsilon * wiener_norm(project_P_perp(z1));
  if (z3) r += 2.0 / epsilon * wiener_norm(*z3);
  return r;
}

RefinedBounds refined_bounds(const EnvelopeTrajectory& traj, EnvelopeSolver& solver) {
  const SimConfig& cfg = solver.config();
  const double eps = cfg.epsilon;
  const int slot3 = harmonic_slot(solver.harmonics(), 3);
  const ModeDecomp& d1 = solver.decomp(1);
  RefinedBounds b;
  for (std::size_t q = 0; q < traj.states.size(); ++q) {
    const EnvelopeState& s = traj.states[q];
    const SpectralField perp = project_Peps_perp(s.u[0], d1);
    b.proj_perp_over_eps = std::max(b.proj_perp_over_eps, wiener_norm(perp) / eps);
    b.proj_perp_dmu_over_eps = std::max(b.proj_perp_dmu_over_eps, wiener_norm(apply_Dmu(perp)) / eps);
    const SpectralField z1 = solver.to_z(s.u[0], 1, s.t);
    SpectralField z3;
    if (slot3 >= 0) {
      const SpectralField& u3 = s.u[slot3];
      b.u3_over_eps = std::max(b.u3_over_eps, wiener_norm(u3) / eps);
      b.u3_W1_over_eps = std::max(b.u3_W1_over_eps, ws_norm(u3, 1) / eps);
      b.u3_dmu_over_eps = std::max(b.u3_dmu_over_eps, wiener_norm(apply_Dmu(u3)) / eps);
      z3 = solver.to_z(u3, 3, s.t);
    }
    const double sn = scaled_norm(z1, slot3 >= 0 ? &z3 : nullptr, eps);
    b.scaled_norm_max = std::max(b.scaled_norm_max, sn);
    if (q == 0) {
      b.scaled_norm_initial = sn;
      const double grad = wiener_norm(apply_Dmu(s.u[0]));
      if (grad > 0.0) b.initial_projection_constant = wiener_norm(project_P_perp(z1)) / (eps * grad);
    }
  }
  return b;
}

double slow_derivative_norm(const EnvelopeState& s, EnvelopeSolver& solver) {
  const SimConfig& cfg = solver.config();
  const ModeDecomp& d1 = solver.decomp(1);
  SpectralField lin = project_Peps(s.u[0], d1);
  for (int i = 0; i < lin.size(); ++i) lin.at(i) *= -kI * d1.eigenvalues(i)[0] / cfg.epsilon;
  SpectralField nl = project_Peps(solver.nonlinear_sums(s, {1})[0], d1);
  nl *= cfg.epsilon;
  lin += nl;
  return wiener_norm(lin);
}

SlowDerivative slow_derivative_bound(const EnvelopeTrajectory& traj, EnvelopeSolver& solver) {
  if (traj.states.size() < 2) throw ValidationError("slow_derivative_bound: need at least two snapshots");
  const ModeDecomp& d1 = solver.decomp(1);
  SlowDerivative r;
  SpectralField prev = project_Peps(traj.states[0].u[0], d1);
  for (std::size_t q = 0; q < traj.states.size(); ++q) {
    r.analytic = std::max(r.analytic, slow_derivative_norm(traj.states[q], solver));
    if (q > 0) {
      SpectralField cur = project_Peps(traj.states[q].u[0], d1);
      SpectralField d = cur;
      d -= prev;
      const double dt = traj.states[q].t - traj.states[q - 1].t;
      r.finite_difference = std::max(r.finite_difference, wiener_norm(d) / dt);
      prev = std::move(cur);
    }
  }
  return r;
}

ResidualNorms residual_norm(const EnvelopeState& s, EnvelopeSolver& solver) {
  const SimConfig& cfg = solver.config();
  const double eps = cfg.epsilon;
  const std::vector<int> targets = residual_harmonics(cfg.variant);
  std::vector<int> jset = signed_harmonics(cfg.variant);
  ResidualNorms r;
  for (int target : targets) {
    double sum = 0.0;
    for (const IndexTriple& J : enumerate_index_set(target, jset)) sum += wiener_norm(solver.nonlinear_term(s, J));
    // the -target harmonic mirrors the +target one
    r.bound += 2.0 * eps * sum;
    if (target == targets.front()) r.lowest = 2.0 * eps * sum;
  }
  // Exact: assemble on the global wavenumber lattice, keyed by m + j * carrier.
  const std::vector<SpectralField> sums = solver.nonlinear_sums(s, targets);
  const int carrier = cfg.carrier_mode();
  const Grid& g = cfg.env_grid;
  std::map<long, CVec> lattice;
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const cplx phase = carrier_phase(targets[q], cfg.problem->disp.omega, s.t, eps);
    for (int i = 0; i < g.N; ++i) {
      const CVec v = eps * phase * sums[q].at(i);
      const long key = g.mode(i) + static_cast<long>(targets[q]) * carrier;
      auto add = [&](long k, const CVec& w) {
        auto [it, fresh] = lattice.try_emplace(k, w);
        if (!fresh) it->second += w;
      };
      add(key, v);
      add(-key, v.conjugate());
    }
  }
  double total = 0.0;
  for (const auto& [k, v] : lattice) total += v.norm();
  r.exact = total * g.dk();
  return r;
}

std::vector<DiagnosticsRecord> diagnose(const ReferenceTrajectory& ref, const EnvelopeTrajectory& env,
                                        EnvelopeSolver& solver) {
  if (ref.states.size() != env.states.size()) throw ValidationError("diagnose: snapshot counts differ");
  const SimConfig& cfg = solver.config();
  const double eps = cfg.epsilon;
  const int slot3 = harmonic_slot(solver.harmonics(), 3);
  const ModeDecomp& d1 = solver.decomp(1);
  std::vector<DiagnosticsRecord> out;
  double dt_sup = 0.0;
  for (std::size_t q = 0; q < env.states.size(); ++q) {
    const EnvelopeState& s = env.states[q];
    DiagnosticsRecord rec;
    rec.epsilon = eps;
    rec.t = env.slow_times[q];
    const ErrorNorms e = error_norms(ref.states[q], s, cfg);
    rec.err_W = e.W;
    rec.err_Linf = e.Linf;
    const SpectralField perp = project_Peps_perp(s.u[0], d1);
    rec.proj_perp_u1 = wiener_norm(perp);
    rec.proj_perp_dmu = wiener_norm(apply_Dmu(perp));
    const SpectralField z1 = solver.to_z(s.u[0], 1, s.t);
    SpectralField z3;
    if (slot3 >= 0) {
      const SpectralField& u3 = s.u[slot3];
      rec.u3_W = wiener_norm(u3);
      rec.u3_W1 = ws_norm(u3, 1);
      rec.u3_dmu = wiener_norm(apply_Dmu(u3));
      z3 = solver.to_z(u3, 3, s.t);
    }
    rec.scaled_norm_z = scaled_norm(z1, slot3 >= 0 ? &z3 : nullptr, eps);
    const ResidualNorms res = residual_norm(s, solver);
    rec.residual_W = res.bound;
    rec.residual_lowest = res.lowest;
    rec.residual_exact = res.exact;
    dt_sup = std::max(dt_sup, slow_derivative_norm(s, solver));
    rec.dt_Pu1 = dt_sup;
    out.push_back(rec);
  }
  return out;
}

}  // namespace envelope
