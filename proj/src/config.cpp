#include "envelope/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "envelope/format.hpp"

namespace envelope {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("config: " + where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) fail(where + "." + k, "unknown key");
  }
}

double num(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? parse_number(obj.at(key), where + "." + key) : fallback;
}

int integer(const json& obj, const std::string& key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const double v = parse_number(obj.at(key), where + "." + key);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(where + "." + key, "expected an integer");
  return static_cast<int>(v);
}

RMat matrix(const json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) fail(where, "expected " + std::to_string(n) + " rows");
  RMat m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!v[r].is_array() || static_cast<int>(v[r].size()) != n) fail(where, "row " + std::to_string(r) + " has the wrong length");
    for (int c = 0; c < n; ++c) m(r, c) = parse_number(v[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

json matrix_json(const RMat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(fmt17(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

std::string scheme_name(ReferenceScheme s) { return s == ReferenceScheme::strang ? "strang" : "lawson_rk4"; }

}  // namespace

double parse_number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) fail(where, "expected a number or a decimal string");
  std::string s = v.get<std::string>();
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = kPi;
    s.resize(s.size() - 2);
    if (s.empty()) s = "1";
  }
  double out = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(where, "cannot parse '" + v.get<std::string>() + "'");
  out *= factor;
  if (!std::isfinite(out)) fail(where, "not finite");
  return out;
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, "<root>", {"system", "dispersion", "profile", "grid", "solver", "sweep"});
  RunConfig rc;
  auto pb = std::make_shared<Problem>();
  json norm;

  const json sys = doc.value("system", json{{"kind", "klein_gordon"}});
  if (!sys.is_object() || !sys.contains("kind") || !sys.at("kind").is_string()) fail("system.kind", "missing");
  const std::string kind = sys.at("kind").get<std::string>();
  if (kind == "klein_gordon") {
    only_keys(sys, "system", {"kind", "nu", "M"});
    const double nu = num(sys, "nu", "system", 1.0);
    RMat M(2, 2);
    M << 0, -1, 1, 0;
    if (sys.contains("M")) M = matrix(sys.at("M"), 2, "system.M");
    pb->spec = builtin_klein_gordon(nu, M);
    norm["system"] = {{"kind", kind}, {"nu", fmt17(nu)}, {"M", matrix_json(M)}};
  } else if (kind == "maxwell_lorentz_1d") {
    only_keys(sys, "system", {"kind"});
    pb->spec = builtin_maxwell_lorentz_1d();
    norm["system"] = {{"kind", kind}};
  } else if (kind == "custom") {
    only_keys(sys, "system", {"kind", "n", "A", "E", "T", "name"});
    const int n = integer(sys, "n", "system", 0);
    if (n < 1 || n > kernels::kMaxN) fail("system.n", "out of range");
    if (!sys.contains("A") || !sys.contains("E") || !sys.contains("T")) fail("system", "custom systems need A, E and T");
    SystemSpec spec;
    spec.d = 1;
    spec.n = n;
    spec.A = {matrix(sys.at("A"), n, "system.A")};
    spec.E = matrix(sys.at("E"), n, "system.E");
    const json& t = sys.at("T");
    const std::size_t count = static_cast<std::size_t>(n) * n * n * n;
    if (!t.is_array() || t.size() != count) fail("system.T", "expected " + std::to_string(count) + " coefficients");
    std::vector<double> coeffs(count);
    json tn = json::array();
    for (std::size_t q = 0; q < count; ++q) {
      coeffs[q] = parse_number(t[q], "system.T[" + std::to_string(q) + "]");
      tn.push_back(fmt17(coeffs[q]));
    }
    spec.T = Trilinear::from_tensor(n, std::move(coeffs));
    spec.name = sys.value("name", "custom");
    spec.validate();
    pb->spec = std::move(spec);
    norm["system"] = {{"kind", kind}, {"n", n}, {"A", matrix_json(pb->spec.A[0])}, {"E", matrix_json(pb->spec.E)},
                      {"T", tn}, {"name", pb->spec.name}};
  } else {
    fail("system.kind", "unknown system '" + kind + "'");
  }

  const json disp = doc.value("dispersion", json::object());
  only_keys(disp, "dispersion", {"kappa", "branch"});
  if (!disp.contains("kappa")) fail("dispersion.kappa", "missing");
  const double kappa = num(disp, "kappa", "dispersion", 1.0);
  BranchSelector sel;
  json branch = "smallest_positive";
  if (disp.contains("branch")) {
    const json& b = disp.at("branch");
    if (b.is_string() && b.get<std::string>() == "smallest_positive") {
    } else {
      sel.kind = BranchSelector::Kind::index;
      sel.index = static_cast<int>(parse_number(b, "dispersion.branch"));
      branch = sel.index;
    }
  }
  pb->disp = find_dispersion(pb->spec, kappa, sel);
  norm["dispersion"] = {{"kappa", fmt17(kappa)}, {"branch", branch}};

  const json grid = doc.value("grid", json::object());
  only_keys(grid, "grid", {"length", "envelope_modes", "reference_harmonics"});
  rc.grid.length = num(grid, "length", "grid", rc.grid.length);
  rc.grid.envelope_modes = integer(grid, "envelope_modes", "grid", rc.grid.envelope_modes);
  rc.grid.reference_harmonics = integer(grid, "reference_harmonics", "grid", rc.grid.reference_harmonics);
  if (!(rc.grid.length > 0.0)) fail("grid.length", "must be positive");
  if (rc.grid.envelope_modes < 8 || (rc.grid.envelope_modes & (rc.grid.envelope_modes - 1)) != 0) {
    fail("grid.envelope_modes", "must be a power of two >= 8");
  }
  if (rc.grid.reference_harmonics < 1) fail("grid.reference_harmonics", "must be >= 1");
  norm["grid"] = {{"length", fmt17(rc.grid.length)},
                  {"envelope_modes", rc.grid.envelope_modes},
                  {"reference_harmonics", rc.grid.reference_harmonics}};

  const json prof = doc.value("profile", json::object());
  only_keys(prof, "profile", {"kind", "amplitude", "center", "width", "samples"});
  const std::string pkind = prof.value("kind", "gaussian");
  EnvelopeProfile& p = pb->profile;
  p.polarization = pb->disp.kernel_vec;
  if (pkind == "gaussian") {
    p.amplitude = num(prof, "amplitude", "profile", p.amplitude);
    p.center = num(prof, "center", "profile", p.center);
    p.width = num(prof, "width", "profile", p.width);
    if (!(p.width > 0.0)) fail("profile.width", "must be positive");
    norm["profile"] = {{"kind", pkind}, {"amplitude", fmt17(p.amplitude)}, {"center", fmt17(p.center)},
                       {"width", fmt17(p.width)}};
  } else if (pkind == "sampled") {
    p.kind = EnvelopeProfile::Kind::sampled;
    if (!prof.contains("samples") || !prof.at("samples").is_array()) fail("profile.samples", "missing");
    json sn = json::array();
    for (std::size_t q = 0; q < prof.at("samples").size(); ++q) {
      p.samples.push_back(parse_number(prof.at("samples")[q], "profile.samples[" + std::to_string(q) + "]"));
      sn.push_back(fmt17(p.samples.back()));
    }
    if (static_cast<int>(p.samples.size()) != rc.grid.envelope_modes) {
      fail("profile.samples", "need one sample per envelope grid point");
    }
    norm["profile"] = {{"kind", pkind}, {"samples", sn}};
  } else {
    fail("profile.kind", "unknown profile '" + pkind + "'");
  }
  p.validate(pb->disp, rc.grid.length);

  const json sol = doc.value("solver", json::object());
  only_keys(sol, "solver", {"t_end_slow", "h_ref_over_eps", "h_env", "max_phase_step", "snapshots", "reference_scheme", "variant",
                            "blowup_factor", "explicit_negatives"});
  SolverOptions& so = rc.solver;
  so.t_end_slow = num(sol, "t_end_slow", "solver", so.t_end_slow);
  so.h_ref_over_eps = num(sol, "h_ref_over_eps", "solver", so.h_ref_over_eps);
  so.h_env = num(sol, "h_env", "solver", so.t_end_slow / 2000.0);
  so.max_phase_step = num(sol, "max_phase_step", "solver", so.max_phase_step);
  so.snapshots = integer(sol, "snapshots", "solver", so.snapshots);
  so.blowup_factor = num(sol, "blowup_factor", "solver", so.blowup_factor);
  if (sol.contains("reference_scheme")) {
    const json& s = sol.at("reference_scheme");
    if (s == "strang") so.reference_scheme = ReferenceScheme::strang;
    else if (s == "lawson_rk4") so.reference_scheme = ReferenceScheme::lawson_rk4;
    else fail("solver.reference_scheme", "expected strang or lawson_rk4");
  }
  if (sol.contains("variant")) {
    try {
      so.variant = variant_from_string(sol.at("variant").get<std::string>());
    } catch (const std::exception& e) {
      fail("solver.variant", e.what());
    }
  }
  if (sol.contains("explicit_negatives")) {
    if (!sol.at("explicit_negatives").is_boolean()) fail("solver.explicit_negatives", "expected true or false");
    so.explicit_negatives = sol.at("explicit_negatives").get<bool>();
  }
  if (!(so.t_end_slow >= 0.0)) fail("solver.t_end_slow", "must be >= 0");
  if (!(so.h_ref_over_eps > 0.0)) fail("solver.h_ref_over_eps", "must be positive");
  if (!(so.h_env > 0.0)) fail("solver.h_env", "must be positive");
  if (!(so.max_phase_step >= 0.0)) fail("solver.max_phase_step", "must be >= 0");
  if (so.snapshots < 1) fail("solver.snapshots", "must be >= 1");
  if (!(so.blowup_factor > 1.0)) fail("solver.blowup_factor", "must exceed 1");
  norm["solver"] = {{"t_end_slow", fmt17(so.t_end_slow)},
                    {"h_ref_over_eps", fmt17(so.h_ref_over_eps)},
                    {"h_env", fmt17(so.h_env)},
                    {"max_phase_step", fmt17(so.max_phase_step)},
                    {"snapshots", so.snapshots},
                    {"reference_scheme", scheme_name(so.reference_scheme)},
                    {"variant", to_string(so.variant)},
                    {"blowup_factor", fmt17(so.blowup_factor)},
                    {"explicit_negatives", so.explicit_negatives}};

  const json sw = doc.value("sweep", json::object());
  only_keys(sw, "sweep", {"epsilons", "variants", "purity_check"});
  if (sw.contains("epsilons")) {
    const json& e = sw.at("epsilons");
    if (!e.is_array() || e.empty()) fail("sweep.epsilons", "expected a non-empty list");
    rc.sweep.epsilons.clear();
    for (std::size_t q = 0; q < e.size(); ++q) {
      const double v = parse_number(e[q], "sweep.epsilons[" + std::to_string(q) + "]");
      if (!(v > 0.0 && v <= 1.0)) fail("sweep.epsilons[" + std::to_string(q) + "]", "must lie in (0, 1]");
      if (std::find(rc.sweep.epsilons.begin(), rc.sweep.epsilons.end(), v) != rc.sweep.epsilons.end()) {
        fail("sweep.epsilons[" + std::to_string(q) + "]", "duplicate value");
      }
      rc.sweep.epsilons.push_back(v);
    }
  }
  if (sw.contains("variants")) {
    const json& vs = sw.at("variants");
    if (!vs.is_array() || vs.empty()) fail("sweep.variants", "expected a non-empty list");
    rc.sweep.variants.clear();
    for (const auto& v : vs) {
      try {
        rc.sweep.variants.push_back(variant_from_string(v.get<std::string>()));
      } catch (const std::exception& e) {
        fail("sweep.variants", e.what());
      }
    }
  }
  if (sw.contains("purity_check")) {
    if (!sw.at("purity_check").is_boolean()) fail("sweep.purity_check", "expected true or false");
    rc.sweep.purity_check = sw.at("purity_check").get<bool>();
  }
  json eps = json::array();
  for (double e : rc.sweep.epsilons) eps.push_back(fmt17(e));
  json vars = json::array();
  for (Variant v : rc.sweep.variants) vars.push_back(to_string(v));
  norm["sweep"] = {{"epsilons", eps}, {"variants", vars}, {"purity_check", rc.sweep.purity_check}};

  rc.problem = std::move(pb);
  rc.source = std::move(norm);
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

RunConfig default_config() { return parse_config(json{{"dispersion", {{"kappa", "1"}}}}); }

SimConfig make_sim_config(const RunConfig& rc, double epsilon, Variant variant, bool* snapped) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  const double kappa = rc.problem->disp.kappa;
  const double e = snap_epsilon(kappa, rc.grid.length, epsilon);
  if (snapped) *snapped = std::abs(e - epsilon) > 1e-14 * epsilon;
  SimConfig cfg;
  cfg.problem = rc.problem;
  cfg.epsilon = e;
  cfg.t_end_slow = rc.solver.t_end_slow;
  cfg.h_ref = rc.solver.h_ref_over_eps * e;
  cfg.h_env = rc.solver.h_env;
  cfg.max_phase_step = rc.solver.max_phase_step;
  cfg.variant = variant;
  cfg.env_grid = Grid(rc.grid.length, rc.grid.envelope_modes);
  GridOptions go = rc.grid;
  go.reference_harmonics = std::max(go.reference_harmonics, max_harmonic(variant));
  cfg.ref_grid = reference_grid_for(kappa, e, go);
  cfg.snapshots = rc.solver.snapshots;
  cfg.reference_scheme = rc.solver.reference_scheme;
  cfg.explicit_negatives = rc.solver.explicit_negatives;
  cfg.blowup_factor = rc.solver.blowup_factor;
  return cfg;
}

}  // namespace envelope
