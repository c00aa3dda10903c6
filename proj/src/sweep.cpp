#include "envelope/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "envelope/format.hpp"

namespace envelope {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sup_err(const ReferenceTrajectory& ref, const EnvelopeTrajectory& env, const SimConfig& cfg) {
  double e = 0.0;
  for (std::size_t q = 0; q < env.states.size(); ++q) e = std::max(e, error_norms(ref.states[q], env.states[q], cfg).W);
  return e;
}

RunResult evaluate(const SimConfig& cfg, const ReferenceTrajectory& ref, double ref_seconds) {
  RunResult r;
  r.variant = cfg.variant;
  r.epsilon = cfg.epsilon;
  r.ref_modes = cfg.ref_grid.N;
  r.h_ref = cfg.h_ref;
  r.h_env = cfg.h_env;
  r.t_end_slow = cfg.t_end_slow;
  r.ref_steps = ref.steps;
  r.ref_seconds = ref_seconds;
  const auto t0 = std::chrono::steady_clock::now();
  const EnvelopeTrajectory env = simulate_envelope(cfg);
  r.env_seconds = seconds_since(t0);
  r.env_steps = env.steps;
  // step actually taken, in slow time
  if (env.steps > 0) r.h_env = cfg.t_end_slow / static_cast<double>(env.steps);
  EnvelopeSolver solver(cfg);
  r.records = diagnose(ref, env, solver);
  r.bounds = refined_bounds(env, solver);
  if (env.states.size() >= 2) r.dt = slow_derivative_bound(env, solver);
  for (const auto& rec : r.records) {
    r.sup_err_W = std::max(r.sup_err_W, rec.err_W);
    r.sup_err_Linf = std::max(r.sup_err_Linf, rec.err_Linf);
    r.sup_residual = std::max(r.sup_residual, rec.residual_W);
  }
  return r;
}

}  // namespace

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size()) throw ValidationError("fit_rate: length mismatch");
  RateFit f;
  std::vector<double> x, y;
  std::ostringstream note;
  for (std::size_t q = 0; q < eps.size(); ++q) {
    if (!(err[q] > 0.0) || !(eps[q] > 0.0)) {
      note << "excluded eps=" << fmt17(eps[q]) << " (error below floor); ";
      continue;
    }
    x.push_back(std::log(eps[q]));
    y.push_back(std::log(err[q]));
  }
  f.used = static_cast<int>(x.size());
  if (f.used < 2) {
    note << "fewer than two usable points";
    f.slope = f.intercept = std::numeric_limits<double>::quiet_NaN();
    f.note = note.str();
    return f;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    mx += x[q];
    my += y[q];
  }
  mx /= f.used;
  my /= f.used;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    sxx += (x[q] - mx) * (x[q] - mx);
    sxy += (x[q] - mx) * (y[q] - my);
  }
  if (sxx == 0.0) {
    note << "all epsilons equal";
    f.slope = std::numeric_limits<double>::quiet_NaN();
    f.intercept = my;
  } else {
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
  }
  f.note = note.str();
  return f;
}

const RateFit* SweepResult::rate(Variant v) const {
  for (const auto& [var, fit] : rates) {
    if (var == v) return &fit;
  }
  return nullptr;
}

std::vector<const RunResult*> SweepResult::runs_for(Variant v) const {
  std::vector<const RunResult*> out;
  for (const auto& r : runs) {
    if (r.variant == v) out.push_back(&r);
  }
  return out;
}

RunResult run_single(const RunConfig& rc, double epsilon, Variant variant) {
  const SimConfig cfg = make_sim_config(rc, epsilon, variant);
  const auto t0 = std::chrono::steady_clock::now();
  const ReferenceTrajectory ref = simulate_reference(cfg);
  return evaluate(cfg, ref, seconds_since(t0));
}

SweepResult run_point(const RunConfig& rc, double epsilon, Variant variant) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult out;
  out.config = rc;
  out.config.sweep.epsilons = {epsilon};
  out.config.sweep.variants = {variant};
  out.assumptions = check_assumptions(rc.problem->spec, rc.problem->disp);
  out.nonresonance = check_nonresonance(rc.problem->spec, rc.problem->disp);
  out.runs.push_back(run_single(rc, epsilon, variant));
  out.rates.emplace_back(variant, fit_rate({out.runs[0].epsilon}, {out.runs[0].sup_err_W}));
  out.seconds = seconds_since(start);
  return out;
}

SweepResult run_sweep(const RunConfig& rc, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult out;
  out.config = rc;
  out.assumptions = check_assumptions(rc.problem->spec, rc.problem->disp);
  out.nonresonance = check_nonresonance(rc.problem->spec, rc.problem->disp);
  std::vector<double> eps_list;
  for (double e : rc.sweep.epsilons) eps_list.push_back(snap_epsilon(rc.problem->disp.kappa, rc.grid.length, e));
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  if (eps_list.size() < 3) throw ValidationError("sweep: need at least three epsilon values");
  if (std::adjacent_find(eps_list.begin(), eps_list.end()) != eps_list.end()) {
    throw ValidationError("sweep: duplicate epsilon (after snapping to the grid)");
  }
  const auto& variants = rc.sweep.variants;
  const int ne = static_cast<int>(eps_list.size());
  const int nv = static_cast<int>(variants.size());
  std::vector<RunResult> grid(static_cast<std::size_t>(ne) * nv);

  // Each worker owns its solvers; only the progress callback is shared.
#pragma omp parallel for schedule(dynamic)
  for (int e = 0; e < ne; ++e) {
    try {
      const SimConfig base = make_sim_config(rc, eps_list[e], variants.front());
      auto t0 = std::chrono::steady_clock::now();
      const ReferenceTrajectory ref = simulate_reference(base);
      const double ref_seconds = seconds_since(t0);
      // Purity is only judged on j3, so the halved reference is built only when j3 is swept.
      bool want_purity = false;
      for (Variant v : variants) want_purity = want_purity || (rc.sweep.purity_check && v == Variant::j3);
      ReferenceTrajectory ref_half;
      if (want_purity) {
        SimConfig half = base;
        half.h_ref *= 0.5;
        ref_half = simulate_reference(half);
      }
      for (int v = 0; v < nv; ++v) {
        SimConfig cfg = make_sim_config(rc, eps_list[e], variants[v]);
        RunResult r = evaluate(cfg, ref, ref_seconds);
        if (want_purity && variants[v] == Variant::j3) {
          SimConfig half = cfg;
          half.h_ref *= 0.5;
          half.h_env *= 0.5;
          half.max_phase_step *= 0.5;
          r.halved_err_W = sup_err(ref_half, simulate_envelope(half), half);
        }
        if (progress) {
          std::ostringstream os;
          os << to_string(r.variant) << " eps=" << fmt17(r.epsilon) << " sup err_W=" << r.sup_err_W;
#pragma omp critical(sweep_progress)
          progress(os.str());
        }
        grid[static_cast<std::size_t>(v) * ne + e] = std::move(r);
      }
    } catch (const std::exception& ex) {
      for (int v = 0; v < nv; ++v) {
        RunResult& r = grid[static_cast<std::size_t>(v) * ne + e];
        if (!r.records.empty()) continue;
        r.variant = variants[v];
        r.epsilon = eps_list[e];
        r.t_end_slow = rc.solver.t_end_slow;
        r.sup_err_W = r.sup_err_Linf = r.sup_residual = std::numeric_limits<double>::quiet_NaN();
        r.failure = ex.what();
      }
    }
  }

  for (double e : rc.sweep.epsilons) {
    const double s = snap_epsilon(rc.problem->disp.kappa, rc.grid.length, e);
    if (std::abs(s - e) > 1e-14 * e) out.warnings.push_back("epsilon " + fmt17(e) + " snapped to " + fmt17(s));
  }
  out.runs = std::move(grid);
  for (const RunResult& r : out.runs) {
    if (!r.failure.empty()) {
      out.warnings.push_back(to_string(r.variant) + " eps=" + fmt17(r.epsilon) + " failed: " + r.failure);
    }
  }
  for (Variant v : variants) {
    std::vector<double> eps, err;
    for (const RunResult* r : out.runs_for(v)) {
      eps.push_back(r->epsilon);
      err.push_back(r->sup_err_W);
    }
    out.rates.emplace_back(v, fit_rate(eps, err));
  }
  out.seconds = seconds_since(start);
  return out;
}

}  // namespace envelope
