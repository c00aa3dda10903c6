#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "envelope/config.hpp"
#include "envelope/diagnostics.hpp"

namespace envelope {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  int used = 0;
  std::string note;  // excluded points, too few points
};

// Least squares of log(err) = slope * log(eps) + intercept. Nonpositive errors are
// excluded and noted; fewer than two usable points gives slope NaN.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& err);

struct RunResult {
  Variant variant = Variant::j3;
  double epsilon = 0.0;
  int ref_modes = 0;
  double h_ref = 0.0;
  double h_env = 0.0;
  double t_end_slow = 0.0;
  std::vector<DiagnosticsRecord> records;
  RefinedBounds bounds;
  SlowDerivative dt;
  double sup_err_W = 0.0;
  double sup_err_Linf = 0.0;
  double sup_residual = 0.0;
  long env_steps = 0;
  long ref_steps = 0;
  // sup err_W with both steps halved; NaN unless the purity check ran (j3 only)
  double halved_err_W = std::numeric_limits<double>::quiet_NaN();
  double env_seconds = 0.0;
  double ref_seconds = 0.0;
  std::string failure;  // non-empty when the run threw; errors are then NaN

  double purity_change() const { return std::abs(halved_err_W - sup_err_W) / sup_err_W; }
};

struct SweepResult {
  RunConfig config;
  AssumptionReport assumptions;
  NonResonanceReport nonresonance;
  std::vector<RunResult> runs;  // by variant (config order), then decreasing epsilon
  std::vector<std::pair<Variant, RateFit>> rates;
  std::vector<std::string> warnings;
  double seconds = 0.0;

  const RateFit* rate(Variant v) const;
  std::vector<const RunResult*> runs_for(Variant v) const;
};

using ProgressFn = std::function<void(const std::string&)>;

// One reference trajectory per epsilon (shared by the variants), one envelope
// trajectory per (epsilon, variant); epsilons run in parallel. A failing epsilon
// leaves rows marked with `failure` and the remaining epsilons still run.
SweepResult run_sweep(const RunConfig& rc, const ProgressFn& progress = {});

// Single (epsilon, variant) run without the purity rerun.
RunResult run_single(const RunConfig& rc, double epsilon, Variant variant);
// The same wrapped as a one-row sweep for report emission (rate left NaN).
SweepResult run_point(const RunConfig& rc, double epsilon, Variant variant);

}  // namespace envelope
