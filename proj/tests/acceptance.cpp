// Acceptance run: one line per criterion, exit status 1 if a gating criterion fails.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "envelope/config.hpp"
#include "envelope/diagnostics.hpp"
#include "envelope/eigen_toolkit.hpp"
#include "envelope/reports.hpp"
#include "envelope/sweep.hpp"

using namespace envelope;

namespace {

struct Verdict {
  int id;
  bool gating;
  bool pass;
  std::string text;
};

std::vector<Verdict> verdicts;

void report(int id, bool gating, bool pass, const std::string& text) {
  verdicts.push_back({id, gating, pass, text});
  std::printf("%s [%d]%s %s\n", pass ? "PASS" : "FAIL", id, gating ? "" : " (experimental, non-gating)", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// max / min over the runs of one variant
template <class F>
double spread(const std::vector<const RunResult*>& runs, F get) {
  double lo = INFINITY, hi = 0.0;
  for (const RunResult* r : runs) {
    lo = std::min(lo, get(*r));
    hi = std::max(hi, get(*r));
  }
  return lo > 0.0 ? hi / lo : INFINITY;
}

std::string series(const std::vector<const RunResult*>& runs, double (*get)(const RunResult&)) {
  std::string s;
  for (const RunResult* r : runs) s += fmt(" %.3g", get(*r));
  return s;
}

RMat kg_M() {
  RMat M(2, 2);
  M << 0, -1, 1, 0;
  return M;
}

SpectralField random_field(const Grid& g, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  SpectralField f(g, n);
  for (auto& c : f.data()) c = {d(rng), d(rng)};
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string out = "acceptance_out";
  bool skip_j5 = false;
  app.add_option("--out", out, "report directory");
  app.add_flag("--skip-j5", skip_j5, "leave out the experimental j5 variant");
  CLI11_PARSE(app, argc, argv);

  RunConfig rc = default_config();
  rc.sweep.variants = {Variant::svea1, Variant::j3};
  if (!skip_j5) rc.sweep.variants.push_back(Variant::j5);
  rc.sweep.purity_check = true;

  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult res = run_sweep(rc, [](const std::string& s) { std::fprintf(stderr, "  %s\n", s.c_str()); });
  emit_reports(res, out);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double j5_seconds = 0.0;
  for (const RunResult* r : res.runs_for(Variant::j5)) j5_seconds += r->env_seconds;
  for (const auto& w : res.warnings) std::printf("warning: %s\n", w.c_str());

  const auto j3 = res.runs_for(Variant::j3);
  const auto sv = res.runs_for(Variant::svea1);
  const auto j5 = res.runs_for(Variant::j5);
  const double eps_min = j3.back()->epsilon;

  // 1
  {
    const double slope = res.rate(Variant::j3)->slope;
    report(1, true, slope >= 1.7, fmt("j3 err_W slope %.3f (>= 1.7); err_W", slope) + series(j3, [](const RunResult& r) { return r.sup_err_W; }));
    const double secs = total - j5_seconds;
    report(1, true, secs < 600.0, fmt("sweep runtime %.1f s without j5 (< 600 s; %.1f s including j5)", secs, total));
    double worst = 0.0;
    std::string changes;
    for (const RunResult* r : j3) {
      worst = std::max(worst, std::isfinite(r->purity_change()) ? r->purity_change() : INFINITY);
      changes += fmt(" %.2g%%", 100.0 * r->purity_change());
    }
    report(1, true, worst < 0.05, "halving h_ref and h_env changes j3 err_W by" + changes + " (< 5%)");
  }
  // 2
  {
    const double slope = res.rate(Variant::svea1)->slope;
    report(2, true, slope >= 0.7 && slope <= 1.4,
           fmt("svea1 err_W slope %.3f (in [0.7, 1.4]); err_W", slope) + series(sv, [](const RunResult& r) { return r.sup_err_W; }));
    const double ratio = sv.back()->sup_err_W / j3.back()->sup_err_W;
    report(2, true, ratio >= 5.0, fmt("err_W(svea1) / err_W(j3) = %.3g at eps = %.4g (>= 5)", ratio, eps_min));
  }
  // 3
  {
    struct Q {
      const char* name;
      double (*get)(const RunResult&);
    };
    const Q qs[] = {{"sup |u3|_L1 / eps", [](const RunResult& r) { return r.bounds.u3_over_eps; }},
                    {"sup |P-perp u1|_L1 / eps", [](const RunResult& r) { return r.bounds.proj_perp_over_eps; }},
                    {"sup |D u3|_L1 / eps", [](const RunResult& r) { return r.bounds.u3_dmu_over_eps; }},
                    {"sup |D P-perp u1|_L1 / eps", [](const RunResult& r) { return r.bounds.proj_perp_dmu_over_eps; }}};
    for (const Q& q : qs) {
      const double s = spread(j3, q.get);
      report(3, true, s <= 2.5, std::string(q.name) + fmt(" varies by %.3g (<= 2.5):", s) + series(j3, q.get));
    }
    double worst = 0.0;
    for (const RunResult* r : j3) worst = std::max(worst, r->bounds.scaled_norm_max / r->bounds.scaled_norm_initial);
    report(3, true, worst <= 3.0, fmt("scaled norm of z grows at most %.4g x its initial value (<= 3)", worst));
  }
  // 4
  {
    auto get = [](const RunResult& r) { return r.dt.analytic; };
    const double s = spread(j3, get);
    report(4, true, s <= 2.0, fmt("sup |d/dt P_eps u1|_L1 varies by %.3g (<= 2):", s) + series(j3, get));
  }
  // 5
  {
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (const SystemSpec& spec : {builtin_klein_gordon(1.0, kg_M()), builtin_maxwell_lorentz_1d()}) {
      for (int N : {8, 16}) {
        const Grid g(3.0 + N, N);
        for (int rep = 0; rep < 50; ++rep) {
          const SpectralField a = random_field(g, spec.n, rng), b = random_field(g, spec.n, rng),
                              c = random_field(g, spec.n, rng);
          const SpectralField f = trilinear_conv(spec, a, b, c), d = trilinear_conv_direct(spec, a, b, c);
          double num = 0.0, den = 0.0;
          for (std::size_t q = 0; q < f.data().size(); ++q) {
            num = std::max(num, std::abs(f.data()[q] - d.data()[q]));
            den = std::max(den, std::abs(d.data()[q]));
          }
          worst = std::max(worst, num / den);
        }
      }
    }
    report(5, true, worst <= 1e-12, fmt("pseudospectral vs direct triple sum: max relative deviation %.2e (<= 1e-12)", worst));
  }
  // 6
  {
    double ref_drift = 0.0, env_drift = 0.0, z_drift = 0.0;
    auto lin = std::make_shared<Problem>(*rc.problem);
    lin->spec.T = Trilinear::zero(2);
    for (const RunResult* r : j3) {
      SimConfig cfg = make_sim_config(rc, r->epsilon, Variant::j3);
      cfg.problem = lin;
      const ReferenceTrajectory ref = simulate_reference(cfg);
      const double w0 = wiener_norm(ref.states.front().u_hat);
      for (const auto& s : ref.states) ref_drift = std::max(ref_drift, std::abs(wiener_norm(s.u_hat) - w0) / w0);
      const EnvelopeTrajectory env = simulate_envelope(cfg);
      EnvelopeSolver solver(cfg);
      const EnvelopeState& e0 = env.states.front();
      const double v0 = wiener_norm(e0.u[0]);
      for (const auto& s : env.states) {
        env_drift = std::max(env_drift, std::abs(wiener_norm(s.u[0]) - v0) / v0);
        for (std::size_t q = 0; q < s.u.size(); ++q) {
          const int j = solver.harmonics()[q];
          SpectralField dz = solver.to_z(s.u[q], j, s.t);
          dz -= solver.to_z(e0.u[q], j, 0.0);
          z_drift = std::max(z_drift, dz.max_abs() / e0.u[0].max_abs());
        }
      }
    }
    report(6, true, ref_drift <= 1e-10 && env_drift <= 1e-10,
           fmt("T = 0: Wiener norm drift %.2e (reference), %.2e (envelope) (<= 1e-10)", ref_drift, env_drift));
    report(6, true, z_drift <= 1e-12, fmt("T = 0: max |z(t) - z(0)| / max |z(0)| = %.2e (<= 1e-12)", z_drift));
  }
  // 7
  {
    const SystemSpec& spec = rc.problem->spec;
    const DispersionData& d = rc.problem->disp;
    const double omega_err = std::abs(d.omega - std::sqrt(2.0)) / std::sqrt(2.0);
    double det_err = 0.0;
    for (int j : {3, 5}) {
      const cplx det = assemble_L(spec, j * d.omega, j * d.kappa).determinant();
      det_err = std::max(det_err, std::abs(det - cplx(j * j - 1.0)) / (j * j - 1.0));
    }
    const double gap = check_nonresonance(spec, d).gap;
    report(7, true, omega_err <= 1e-12 && det_err <= 1e-10 && std::abs(gap - 0.8916845) <= 1e-6,
           fmt("omega rel err %.1e, det L(j omega, j kappa) rel err %.1e, gap %.10f (0.8916845 +- 1e-6)", omega_err,
               det_err, gap));
  }
  // 8
  {
    double imag = 0.0, u30 = 0.0;
    for (const RunResult* r : j3) {
      SimConfig cfg = make_sim_config(rc, r->epsilon, Variant::j3);
      cfg.t_end_slow = 0.05;
      cfg.snapshots = 1;
      const EnvelopeTrajectory env = simulate_envelope(cfg);
      u30 = std::max(u30, env.states.front().u[1].max_abs());
      const PhysicalField u = reconstruct(env.states.back(), cfg, cfg.ref_grid, linf_points(cfg, cfg.ref_grid));
      double re = 0.0, im = 0.0;
      for (const cplx& c : u.values) {
        re = std::max(re, std::abs(c.real()));
        im = std::max(im, std::abs(c.imag()));
      }
      imag = std::max(imag, im / re);
    }
    report(8, true, imag <= 1e-11, fmt("reconstruction imaginary part %.2e relative (<= 1e-11)", imag));
    report(8, true, u30 == 0.0, fmt("u3(0) max modulus %.1e (= 0)", u30));
    auto get = [](const RunResult& r) { return r.bounds.initial_projection_constant; };
    double hi = 0.0;
    for (const RunResult* r : j3) hi = std::max(hi, get(*r));
    const double s = spread(j3, get);
    report(8, true, std::isfinite(hi) && s <= 1.5,
           fmt("|P-perp z1(0)| / (eps |grad p|_W) varies by %.4g across eps (bounded):", s) + series(j3, get));
    const auto js = signed_harmonics(Variant::j3);
    const std::size_t c1 = enumerate_index_set(1, js).size(), c3 = enumerate_index_set(3, js).size();
    report(8, true, c1 == 12 && c3 == 10, fmt("index-set cardinalities %g (j = 1) and %g (j = 3)", c1, c3));
  }
  // 9
  if (!j5.empty()) {
    const double slope = res.rate(Variant::j5)->slope;
    report(9, false, slope >= 2.5, fmt("j5 err_W slope %.3f (>= 2.5); err_W", slope) + series(j5, [](const RunResult& r) { return r.sup_err_W; }));
  } else {
    report(9, false, false, "j5 skipped");
  }

  int failed = 0;
  for (const auto& v : verdicts) failed += v.gating && !v.pass;
  std::printf("%d of %zu gating checks failed; reports in %s\n", failed,
              static_cast<std::size_t>(std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.gating; })),
              out.c_str());
  return failed == 0 ? 0 : 1;
}
