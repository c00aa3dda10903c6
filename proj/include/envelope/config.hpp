#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "envelope/solvers.hpp"

namespace envelope {

struct SolverOptions {
  double t_end_slow = 0.5;
  double h_ref_over_eps = 1.0 / 20.0;
  double h_env = 0.5 / 2000.0;
  double max_phase_step = 0.35;
  int snapshots = 16;
  ReferenceScheme reference_scheme = ReferenceScheme::lawson_rk4;
  Variant variant = Variant::j3;
  double blowup_factor = 10.0;
  bool explicit_negatives = false;
};

struct SweepOptions {
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  std::vector<Variant> variants{Variant::svea1, Variant::j3};
  bool purity_check = true;
};

struct RunConfig {
  std::shared_ptr<const Problem> problem;
  GridOptions grid;
  SolverOptions solver;
  SweepOptions sweep;
  nlohmann::json source;  // normalized document; reloads to the same config
};

// Parses the JSON document; numbers may be JSON numbers or decimal strings
// ("0.5", "64pi"). Unknown keys and bad values throw ValidationError naming the key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
// Built-in default: Klein-Gordon, nu = kappa = 1, M = [[0,-1],[1,0]].
RunConfig default_config();

// epsilon is snapped to the nearest commensurable value; `snapped` reports the change.
SimConfig make_sim_config(const RunConfig& rc, double epsilon, Variant variant, bool* snapped = nullptr);

double parse_number(const nlohmann::json& v, const std::string& where);

}  // namespace envelope
