#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "envelope/config.hpp"
#include "envelope/format.hpp"
#include "envelope/reports.hpp"
#include "envelope/snapshot_io.hpp"
#include "envelope/sweep.hpp"

using namespace envelope;
namespace fs = std::filesystem;

namespace {

int print_checks(const RunConfig& rc) {
  const AssumptionReport a = check_assumptions(rc.problem->spec, rc.problem->disp);
  const NonResonanceReport n = check_nonresonance(rc.problem->spec, rc.problem->disp);
  const DispersionData& d = rc.problem->disp;
  std::printf("system            %s (n = %d)\n", rc.problem->spec.name.c_str(), rc.problem->spec.n);
  std::printf("kappa, omega      %s, %s\n", fmt17(d.kappa).c_str(), fmt17(d.omega).c_str());
  std::printf("kernel dim        %d (second singular value %.3e)  %s\n", a.kernel_dim, a.kernel_second_singular,
              a.kernel_ok ? "ok" : "FAIL");
  std::printf("det L(3w,3k)      %.12g  sigma_min %.3e  %s\n", a.det_L3, a.sigma_min_L3, a.invertible_L3 ? "ok" : "FAIL");
  std::printf("det L(5w,5k)      %.12g  sigma_min %.3e  %s\n", a.det_L5, a.sigma_min_L5, a.invertible_L5 ? "ok" : "FAIL");
  std::printf("lipschitz         %.6g (Weyl bound %.6g)  %s\n", a.lipschitz_estimate, a.lipschitz_weyl_bound,
              a.lipschitz_ok ? "ok" : "FAIL");
  std::printf("non-resonance gap %.10g  %s\n", n.gap, n.passed ? "ok" : "FAIL");
  return a.passed() && n.passed ? 0 : 2;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
  std::vector<Variant> out;
  for (const auto& s : names) out.push_back(variant_from_string(s));
  return out;
}

void warn_snaps(const RunConfig& rc, const std::vector<double>& eps) {
  for (double e : eps) {
    const double s = snap_epsilon(rc.problem->disp.kappa, rc.grid.length, e);
    if (std::abs(s - e) > 1e-14 * e) {
      std::fprintf(stderr, "warning: epsilon %s snapped to commensurable %s\n", fmt17(e).c_str(), fmt17(s).c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-harmonic envelope approximation: reference vs envelope solvers"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", csv_path;
  std::vector<double> eps;
  std::vector<std::string> variants;
  int snapshots = 0;

  auto* check = app.add_subcommand("check", "assumption and non-resonance checks only");
  auto* run = app.add_subcommand("run", "one epsilon, one variant");
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep with rate fits");
  auto* fit = app.add_subcommand("fit", "re-fit rates from an existing sweep.csv");
  for (auto* sc : {check, run, sweep}) sc->add_option("--config", config_path, "JSON config (default: built-in Klein-Gordon)");
  for (auto* sc : {run, sweep}) {
    sc->add_option("--out", out_dir, "output directory");
    sc->add_option("--snapshots", snapshots, "snapshot intervals")->check(CLI::PositiveNumber);
  }
  run->add_option("--eps", eps, "epsilon")->required()->expected(1);
  run->add_option("--variant", variants, "svea1 | j3 | j5")->expected(1);
  sweep->add_option("--eps", eps, "epsilon list")->expected(1, 64);
  sweep->add_option("--variant", variants, "variant list")->expected(1, 3);
  fit->add_option("csv", csv_path, "sweep.csv")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      for (const auto& [v, f] : refit_csv(csv_path)) {
        std::printf("%-6s slope %s  intercept %s  points %d %s\n", to_string(v).c_str(), fmt17(f.slope).c_str(),
                    fmt17(f.intercept).c_str(), f.used, f.note.c_str());
      }
      return 0;
    }
    RunConfig rc = config_path.empty() ? default_config() : load_config(config_path);
    if (snapshots > 0) {
      rc.solver.snapshots = snapshots;
      rc.source["solver"]["snapshots"] = snapshots;
    }
    if (*check) return print_checks(rc);

    if (print_checks(rc) != 0) {
      std::fprintf(stderr, "error: assumption checks failed\n");
      return 2;
    }
    SweepResult res;
    if (*run) {
      const Variant v = variants.empty() ? rc.solver.variant : variant_from_string(variants.front());
      warn_snaps(rc, eps);
      res = run_point(rc, eps.front(), v);
    } else {
      if (!eps.empty()) rc.sweep.epsilons = eps;
      if (!variants.empty()) rc.sweep.variants = parse_variants(variants);
      rc.source["sweep"]["epsilons"] = nlohmann::json::array();
      for (double e : rc.sweep.epsilons) rc.source["sweep"]["epsilons"].push_back(fmt17(e));
      rc.source["sweep"]["variants"] = nlohmann::json::array();
      for (Variant v : rc.sweep.variants) rc.source["sweep"]["variants"].push_back(to_string(v));
      warn_snaps(rc, rc.sweep.epsilons);
      res = run_sweep(rc, [](const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); });
    }
    emit_reports(res, out_dir);
    if (*run) {
      // final states of the single run, for external inspection
      const SimConfig cfg = make_sim_config(rc, eps.front(), res.runs.front().variant);
      fs::create_directories(fs::path(out_dir) / "snapshots");
      const EnvelopeTrajectory env = simulate_envelope(cfg);
      const EnvelopeState& last = env.states.back();
      for (std::size_t q = 0; q < last.u.size(); ++q) {
        const int j = positive_harmonics(cfg.variant)[q];
        write_snapshot(fs::path(out_dir) / "snapshots" / ("u" + std::to_string(j) + ".bin"), last.u[q], last.t);
      }
    }
    for (const auto& [v, f] : res.rates) {
      std::printf("%-6s err_W slope %.4f (%d points) %s\n", to_string(v).c_str(), f.slope, f.used, f.note.c_str());
    }
    std::printf("wrote %s (%.1f s)\n", out_dir.c_str(), res.seconds);
    for (const auto& w : res.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    for (const RunResult& r : res.runs) {
      if (!r.failure.empty()) return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
