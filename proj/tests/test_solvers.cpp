#include <doctest.h>

#include <omp.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "envelope/diagnostics.hpp"
#include "envelope/solvers.hpp"
#include "helpers.hpp"

using namespace envelope;

namespace {

// Spatially constant KG state c: c' = (-nu/eps + eps c.c) M c with c.c conserved.
// E and M commute here, so only the nonlinear sub-steps contribute error.
double homogeneous_error(ReferenceScheme scheme, double h_over_eps) {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3);
  cfg.reference_scheme = scheme;
  ReferenceSolver solver(cfg);
  const Grid& g = cfg.ref_grid;
  const double to_coeff = std::sqrt(2 * kPi) / g.dk();
  const cplx c0[2] = {3.0, -1.5};
  ReferenceState s{SpectralField(g, 2), 0.0};
  s.u_hat.at(g.index(0)) << c0[0] * to_coeff, c0[1] * to_coeff;
  const double t = 2.0, h = h_over_eps * cfg.epsilon;
  const int steps = static_cast<int>(std::lround(t / h));
  for (int q = 0; q < steps; ++q) solver.step(s, t / steps);
  const cplx cc = c0[0] * c0[0] + c0[1] * c0[1];
  const cplx th = (-1.0 / cfg.epsilon + cfg.epsilon * cc) * t;
  const cplx e0 = std::cos(th) * c0[0] - std::sin(th) * c0[1];
  const cplx e1 = std::sin(th) * c0[0] + std::cos(th) * c0[1];
  const auto c = s.u_hat.at(g.index(0)) / to_coeff;
  double other = 0.0;
  for (int i = 0; i < g.N; ++i) {
    if (i != g.index(0)) other = std::max(other, s.u_hat.at(i).norm());
  }
  CHECK(other < 1e-12);
  return std::abs(c[0] - e0) + std::abs(c[1] - e1);
}

}  // namespace

TEST_SUITE("reference") {

TEST_CASE("commensurable epsilon and grid sizing") {
  const double L = 64 * kPi;
  CHECK(snap_epsilon(1.0, L, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(snap_epsilon(1.0, L, 0.0999) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(snap_epsilon(1.0, L, 0.026) == doctest::Approx(32.0 / 1231).epsilon(1e-15) );
  GridOptions go;
  CHECK(reference_grid_for(1.0, 0.1, go).N == 4096);
  CHECK(reference_grid_for(1.0, 0.05, go).N == 8192);
  CHECK(reference_grid_for(1.0, 0.025, go).N == 16384);
  go.reference_harmonics = 3;
  CHECK(reference_grid_for(1.0, 0.1, go).N == 4096);
}

TEST_CASE("config validation") {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3);
  CHECK(cfg.carrier_mode() == 320);
  SimConfig bad = cfg;
  bad.epsilon = 0.0987;
  CHECK_THROWS_AS(bad.carrier_mode(), CommensurabilityError);
  bad = cfg;
  bad.ref_grid = Grid(cfg.ref_grid.L, 1024);
  CHECK_THROWS_AS(bad.validate(), UnderResolvedError);
  bad = cfg;
  bad.h_ref = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.problem = nullptr;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("homogeneous state against the exact rotation") {
  for (ReferenceScheme scheme : {ReferenceScheme::lawson_rk4, ReferenceScheme::strang}) {
    const double e1 = homogeneous_error(scheme, 0.1);
    const double e2 = homogeneous_error(scheme, 0.05);
    CHECK(e2 < 5e-9);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));
  }
}

TEST_CASE("linear flow equals the matrix exponential mode by mode") {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3, true);
  for (ReferenceScheme scheme : {ReferenceScheme::strang, ReferenceScheme::lawson_rk4}) {
    cfg.reference_scheme = scheme;
    ReferenceSolver solver(cfg);
    const ReferenceState s0 = solver.initial_state();
    ReferenceState s = s0;
    const double h = 0.37;
    for (int q = 0; q < 3; ++q) solver.step(s, h);
    const Grid& g = cfg.ref_grid;
    const SystemSpec& spec = cfg.problem->spec;
    double err = 0.0;
    for (int i = 0; i < g.N; i += 61) {
      const CMat G = -(kI * g.k(i) * spec.A[0].cast<cplx>() + spec.E.cast<cplx>() / cfg.epsilon) * (3 * h);
      const CVec want = G.exp() * s0.u_hat.at(i);
      err = std::max(err, (CVec(s.u_hat.at(i)) - want).norm());
    }
    CHECK(err < 1e-12 * s0.u_hat.max_abs());
  }
}

TEST_CASE("isometry of the linear flow in the Wiener norm") {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3, true, 0.1);
  const ReferenceTrajectory tr = simulate_reference(cfg);
  const double w0 = wiener_norm(tr.states.front().u_hat);
  for (const auto& s : tr.states) CHECK(std::abs(wiener_norm(s.u_hat) - w0) <= 1e-10 * w0);
  CHECK(tr.states.back().t == doctest::Approx(cfg.t_end()));
}

TEST_CASE("serial and parallel steps are bitwise identical") {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3);
  ReferenceSolver par(cfg);
  cfg.exec = Exec::serial;
  ReferenceSolver ser(cfg);
  ReferenceState a = par.initial_state(), b = ser.initial_state();
  for (int q = 0; q < 3; ++q) {
    par.step(a, cfg.h_ref);
    ser.step(b, cfg.h_ref);
  }
  CHECK(std::equal(a.u_hat.data().begin(), a.u_hat.data().end(), b.u_hat.data().begin()));
  omp_set_num_threads(saved);
}

TEST_CASE("blow-up guard") {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3, false, 0.05);
  cfg.blowup_factor = 1.0 + 1e-9;
  CHECK_THROWS_AS(simulate_reference(cfg), NumericalBlowup);
}

}

TEST_SUITE("envelope") {

TEST_CASE("initial state: profile on the first harmonic, nothing on the third") {
  const SimConfig cfg = testing::kg_sim(0.1, Variant::j3);
  EnvelopeSolver solver(cfg);
  const EnvelopeState s = solver.initial_state();
  REQUIRE(s.u.size() == 2);
  CHECK(testing::rel_diff(s.u[0], profile_spectrum(*cfg.problem, cfg.env_grid)) == 0.0);
  CHECK(s.u[1].max_abs() == 0.0);
  // p lies in ker L(omega, kappa): the perpendicular part of u_1 vanishes at k = 0
  const SpectralField perp = project_Peps_perp(s.u[0], solver.decomp(1));
  CHECK(perp.at(cfg.env_grid.index(0)).norm() < 1e-14 * s.u[0].max_abs());
}

TEST_CASE("to_z and from_z are inverse") {
  const SimConfig cfg = testing::kg_sim(0.05, Variant::j3);
  EnvelopeSolver solver(cfg);
  const EnvelopeState s = solver.initial_state();
  for (int j : {1, 3, -1}) {
    const SpectralField back = solver.from_z(solver.to_z(s.u[0], j, 3.3), j, 3.3);
    CHECK(testing::rel_diff(back, s.u[0]) < 1e-13);
  }
}

TEST_CASE("slow variables are frozen without the nonlinearity") {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3, true, 0.5);
  const EnvelopeTrajectory tr = simulate_envelope(cfg);
  EnvelopeSolver solver(cfg);
  const SpectralField z0 = solver.to_z(tr.states.front().u[0], 1, 0.0);
  const double w0 = wiener_norm(tr.states.front().u[0]);
  for (const auto& s : tr.states) {
    const SpectralField z = solver.to_z(s.u[0], 1, s.t);
    CHECK(testing::rel_diff(z, z0) <= 1e-12);
    CHECK(std::abs(wiener_norm(s.u[0]) - w0) <= 1e-10 * w0);
  }
}

TEST_CASE("slow variables stay frozen over many phase-limited steps") {
  SimConfig cfg = testing::kg_sim(0.025, Variant::j3, true, 0.5);
  const EnvelopeTrajectory tr = simulate_envelope(cfg);
  REQUIRE(tr.steps > 10000);
  EnvelopeSolver solver(cfg);
  const SpectralField z0 = solver.to_z(tr.states.front().u[0], 1, 0.0);
  for (const auto& s : tr.states) {
    SpectralField dz = solver.to_z(s.u[0], 1, s.t);
    dz -= z0;
    CHECK(dz.max_abs() <= 1e-12 * z0.max_abs());
  }
}

TEST_CASE("explicit negative harmonics reproduce the conjugate mirrors") {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3, false, 0.05);
  cfg.explicit_negatives = true;
  const EnvelopeTrajectory tr = simulate_envelope(cfg);
  const Grid& g = cfg.env_grid;
  double scale = 0.0, err = 0.0;
  for (const auto& s : tr.states) {
    REQUIRE(s.u_neg.size() == s.u.size());
    for (std::size_t q = 0; q < s.u.size(); ++q) {
      scale = std::max(scale, s.u[q].max_abs());
      for (int i = 1; i < g.N; ++i) {
        const CVec mirror = s.u[q].at(g.index(-g.mode(i))).conjugate();
        err = std::max(err, (CVec(s.u_neg[q].at(i)) - mirror).cwiseAbs().maxCoeff());
      }
    }
  }
  CHECK(err <= 1e-12 * scale);
  // and the explicit run tracks the default one
  cfg.explicit_negatives = false;
  const EnvelopeTrajectory plain = simulate_envelope(cfg);
  for (std::size_t q = 0; q < plain.states.back().u.size(); ++q) {
    CHECK(testing::rel_diff(tr.states.back().u[q], plain.states.back().u[q]) < 1e-12);
  }
}

TEST_CASE("time stepping is fourth order in the slow variables") {
  SimConfig cfg = testing::kg_sim(0.1, Variant::j3, false, 0.1);
  cfg.max_phase_step = 0.0;
  cfg.snapshots = 1;
  auto final_u1 = [&](double h_env) {
    SimConfig c = cfg;
    c.h_env = h_env;
    return simulate_envelope(c).states.back().u[1];
  };
  const SpectralField a = final_u1(0.1 / 200), b = final_u1(0.1 / 400), c = final_u1(0.1 / 800);
  SpectralField d1 = a, d2 = b;
  d1 -= b;
  d2 -= c;
  CHECK(wiener_norm(d1) / wiener_norm(d2) == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("phase limit caps the envelope step; without it the step count is epsilon-independent") {
  for (double eps : {0.1, 0.05, 0.025}) {
    SimConfig cfg = testing::kg_sim(eps, Variant::j3);
    EnvelopeSolver solver(cfg);
    CHECK(solver.physical_step() * solver.lambda_max() / eps <= cfg.max_phase_step * (1 + 1e-12));
    cfg.max_phase_step = 0.0;
    EnvelopeSolver free(cfg);
    CHECK(free.physical_step() == doctest::Approx(cfg.h_env / eps));
    CHECK(steps_per_interval(cfg, free.physical_step()) * cfg.snapshots == 2000);
    // envelope grid and mode count do not depend on epsilon
    CHECK(free.decomp(1).size() == cfg.env_grid.N + 1);
  }
}

TEST_CASE("svea1 runs the same code path with one harmonic") {
  const SimConfig cfg = testing::kg_sim(0.1, Variant::svea1);
  EnvelopeSolver solver(cfg);
  CHECK(solver.harmonics() == std::vector<int>{1});
  CHECK_THROWS_AS(solver.decomp(3), ValidationError);
}

}
