#include "envelope/reports.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "envelope/format.hpp"

namespace envelope {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

std::string rate_context(const SweepResult& r, Variant v) {
  const RateFit* f = r.rate(v);
  if (!f) return "";
  std::string s = "slope=" + fmt17(f->slope);
  if (!f->note.empty()) s += " (" + f->note + ")";
  return s;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json report_json(const SweepResult& r) {
  json j;
  j["config"] = r.config.source;
  const AssumptionReport& a = r.assumptions;
  j["assumptions"] = {{"kernel_dim", a.kernel_dim},
                      {"kernel_second_singular", number(a.kernel_second_singular)},
                      {"sigma_min_L3", number(a.sigma_min_L3)},
                      {"sigma_min_L5", number(a.sigma_min_L5)},
                      {"det_L3", number(a.det_L3)},
                      {"det_L5", number(a.det_L5)},
                      {"lipschitz_estimate", number(a.lipschitz_estimate)},
                      {"lipschitz_weyl_bound", number(a.lipschitz_weyl_bound)},
                      {"passed", a.passed()}};
  const NonResonanceReport& n = r.nonresonance;
  j["nonresonance"] = {{"lambda3", std::vector<double>(n.lambda3.data(), n.lambda3.data() + n.lambda3.size())},
                       {"lambda5", std::vector<double>(n.lambda5.data(), n.lambda5.data() + n.lambda5.size())},
                       {"gap", number(n.gap)},
                       {"tolerance", number(n.tolerance)},
                       {"passed", n.passed}};
  json rates = json::object();
  for (const auto& [v, f] : r.rates) {
    rates[to_string(v)] = {{"slope", number(f.slope)}, {"intercept", number(f.intercept)}, {"used", f.used},
                           {"note", f.note}};
  }
  j["rates"] = rates;
  json runs = json::array();
  for (const RunResult& run : r.runs) {
    runs.push_back({{"variant", to_string(run.variant)},
                    {"epsilon", number(run.epsilon)},
                    {"ref_modes", run.ref_modes},
                    {"sup_err_W", number(run.sup_err_W)},
                    {"sup_err_Linf", number(run.sup_err_Linf)},
                    {"sup_err_W_over_eps2", number(run.sup_err_W / (run.epsilon * run.epsilon))},
                    {"halved_err_W", number(run.halved_err_W)},
                    {"u3_over_eps", number(run.bounds.u3_over_eps)},
                    {"u3_W1_over_eps", number(run.bounds.u3_W1_over_eps)},
                    {"u3_dmu_over_eps", number(run.bounds.u3_dmu_over_eps)},
                    {"proj_perp_over_eps", number(run.bounds.proj_perp_over_eps)},
                    {"proj_perp_dmu_over_eps", number(run.bounds.proj_perp_dmu_over_eps)},
                    {"scaled_norm_initial", number(run.bounds.scaled_norm_initial)},
                    {"scaled_norm_max", number(run.bounds.scaled_norm_max)},
                    {"initial_projection_constant", number(run.bounds.initial_projection_constant)},
                    {"dt_Pu1_analytic", number(run.dt.analytic)},
                    {"dt_Pu1_finite_difference", number(run.dt.finite_difference)},
                    {"sup_residual_W", number(run.sup_residual)},
                    {"env_steps", run.env_steps},
                    {"ref_steps", run.ref_steps},
                    {"env_seconds", number(run.env_seconds)},
                    {"ref_seconds", number(run.ref_seconds)},
                    {"failure", run.failure}});
  }
  j["constants"] = runs;
  j["warnings"] = r.warnings;
  return j;
}

void emit_reports(const SweepResult& r, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir / "plots");
  {
    std::ofstream os = open_out(outdir / "sweep.csv");
    os << "variant,epsilon,N,h_ref,h_env,t_end_slow,err_W,err_Linf,u3_W1_over_eps,projperp_over_eps,residual_W,"
          "rate_context\n";
    for (const RunResult& run : r.runs) {
      os << to_string(run.variant) << ',' << fmt17(run.epsilon) << ',' << run.ref_modes << ',' << fmt17(run.h_ref)
         << ',' << fmt17(run.h_env) << ',' << fmt17(run.t_end_slow) << ',' << fmt17(run.sup_err_W) << ','
         << fmt17(run.sup_err_Linf) << ',' << fmt17(run.bounds.u3_W1_over_eps) << ','
         << fmt17(run.bounds.proj_perp_over_eps) << ',' << fmt17(run.sup_residual) << ','
         << (run.failure.empty() ? rate_context(r, run.variant) : "failed") << '\n';
    }
  }
  {
    std::ofstream os = open_out(outdir / "records.csv");
    os << "variant,epsilon,t,err_W,err_Linf,u3_W,u3_W1,u3_dmu,proj_perp_u1,proj_perp_dmu,scaled_norm_z,residual_W,"
          "residual_lowest,residual_exact,dt_Pu1\n";
    for (const RunResult& run : r.runs) {
      for (const DiagnosticsRecord& d : run.records) {
        os << to_string(run.variant) << ',' << fmt17(d.epsilon) << ',' << fmt17(d.t) << ',' << fmt17(d.err_W) << ','
           << fmt17(d.err_Linf) << ',' << fmt17(d.u3_W) << ',' << fmt17(d.u3_W1) << ',' << fmt17(d.u3_dmu) << ','
           << fmt17(d.proj_perp_u1) << ',' << fmt17(d.proj_perp_dmu) << ',' << fmt17(d.scaled_norm_z) << ','
           << fmt17(d.residual_W) << ',' << fmt17(d.residual_lowest) << ',' << fmt17(d.residual_exact) << ','
           << fmt17(d.dt_Pu1) << '\n';
      }
    }
  }
  {
    std::ofstream os = open_out(outdir / "report.json");
    os << report_json(r).dump(2) << '\n';
  }
  for (Variant v : r.config.sweep.variants) {
    std::ofstream os = open_out(outdir / "plots" / ("error_" + to_string(v) + ".dat"));
    os << "# log10(eps) log10(err_W) log10(err_Linf) log10(u3_over_eps) log10(projperp_over_eps)\n";
    for (const RunResult* run : r.runs_for(v)) {
      if (!run->failure.empty()) continue;
      os << fmt17(std::log10(run->epsilon)) << ' ' << fmt17(std::log10(run->sup_err_W)) << ' '
         << fmt17(std::log10(run->sup_err_Linf)) << ' ' << fmt17(std::log10(run->bounds.u3_over_eps)) << ' '
         << fmt17(std::log10(run->bounds.proj_perp_over_eps)) << '\n';
    }
  }
}

std::vector<std::pair<Variant, RateFit>> refit_csv(const std::filesystem::path& csv) {
  std::ifstream is(csv);
  if (!is) throw std::runtime_error("cannot read " + csv.string());
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("refit: empty file " + csv.string());
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto col = [&](const std::string& name) {
    for (std::size_t q = 0; q < header.size(); ++q) {
      if (header[q] == name) return q;
    }
    throw ValidationError("refit: column '" + name + "' missing in " + csv.string());
  };
  const std::size_t cv = col("variant"), ce = col("epsilon"), cw = col("err_W");
  std::vector<Variant> order;
  std::map<Variant, std::pair<std::vector<double>, std::vector<double>>> data;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() <= std::max({cv, ce, cw})) {
      throw ValidationError("refit: line " + std::to_string(lineno) + " has too few columns");
    }
    const Variant v = variant_from_string(cells[cv]);
    if (!data.count(v)) order.push_back(v);
    data[v].first.push_back(parse_number(json(cells[ce]), "line " + std::to_string(lineno) + " epsilon"));
    data[v].second.push_back(parse_number(json(cells[cw]), "line " + std::to_string(lineno) + " err_W"));
  }
  std::vector<std::pair<Variant, RateFit>> out;
  for (Variant v : order) out.emplace_back(v, fit_rate(data[v].first, data[v].second));
  return out;
}

}  // namespace envelope
