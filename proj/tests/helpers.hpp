#pragma once

#include <memory>
#include <random>

#include "envelope/config.hpp"
#include "envelope/solvers.hpp"

namespace testing {

using namespace envelope;

inline RMat kg_M() {
  RMat M(2, 2);
  M << 0, -1, 1, 0;
  return M;
}

// Default Klein-Gordon problem, optionally with T replaced by zero.
inline std::shared_ptr<const Problem> kg_problem(bool linear = false) {
  auto pb = std::make_shared<Problem>(*default_config().problem);
  if (linear) pb->spec.T = Trilinear::zero(2);
  return pb;
}

inline SimConfig kg_sim(double eps, Variant v, bool linear = false, double t_end_slow = 0.5) {
  RunConfig rc = default_config();
  rc.solver.t_end_slow = t_end_slow;
  SimConfig cfg = make_sim_config(rc, eps, v);
  cfg.problem = kg_problem(linear);
  return cfg;
}

inline SpectralField random_field(const Grid& g, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  SpectralField f(g, n);
  for (auto& c : f.data()) c = {d(rng), d(rng)};
  return f;
}

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < a.data().size(); ++q) {
    num = std::max(num, std::abs(a.data()[q] - b.data()[q]));
    den = std::max(den, std::abs(b.data()[q]));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace testing
