#include <doctest.h>

#include <cmath>
#include <random>

#include "envelope/eigen_toolkit.hpp"
#include "envelope/system_model.hpp"
#include "helpers.hpp"

using namespace envelope;

TEST_SUITE("model") {

TEST_CASE("klein-gordon dispersion relation omega = sqrt(kappa^2 + nu^2)") {
  for (double nu : {1.0, 0.5, 2.0}) {
    for (double kappa : {1.0, 0.3, 2.5}) {
      const SystemSpec s = builtin_klein_gordon(nu, testing::kg_M());
      const DispersionData d = find_dispersion(s, kappa);
      CHECK(d.omega == doctest::Approx(std::sqrt(kappa * kappa + nu * nu)).epsilon(1e-13));
      // kernel vector really is annihilated
      CHECK((assemble_L(s, d.omega, kappa) * d.kernel_vec).norm() < 1e-12);
      CHECK(d.kernel_vec.norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("det L(j omega, j kappa) = (j^2 - 1) nu^2") {
  for (double nu : {1.0, 0.7}) {
    const SystemSpec s = builtin_klein_gordon(nu, testing::kg_M());
    const DispersionData d = find_dispersion(s, 1.0);
    for (int j : {3, 5}) {
      const cplx det = assemble_L(s, j * d.omega, j * 1.0).determinant();
      const double want = (j * j - 1) * nu * nu;
      CHECK(std::abs(det.real() - want) <= 1e-10 * want);
      CHECK(std::abs(det.imag()) <= 1e-10 * want);
    }
  }
}

TEST_CASE("non-resonance gap from the closed-form eigenvalues") {
  const SystemSpec s = builtin_klein_gordon(1.0, testing::kg_M());
  const DispersionData d = find_dispersion(s, 1.0);
  const NonResonanceReport r = check_nonresonance(s, d);
  // -j omega +- sqrt(j^2 kappa^2 + nu^2)
  const double w = std::sqrt(2.0);
  const double l3[2] = {-3 * w - std::sqrt(10.0), -3 * w + std::sqrt(10.0)};
  const double l5[2] = {-5 * w - std::sqrt(26.0), -5 * w + std::sqrt(26.0)};
  double gap = 1e300;
  for (double a : l3) {
    for (double b : l5) gap = std::min(gap, std::abs(a - b));
  }
  CHECK(r.gap == doctest::Approx(gap).epsilon(1e-12));
  CHECK(std::abs(r.gap - 0.8916845) < 1e-6);
  CHECK(r.passed);
}

TEST_CASE("assumption report passes for both built-in systems") {
  for (const SystemSpec& s : {builtin_klein_gordon(1.0, testing::kg_M()), builtin_maxwell_lorentz_1d()}) {
    const DispersionData d = find_dispersion(s, 1.0);
    const AssumptionReport a = check_assumptions(s, d);
    CHECK(a.kernel_dim == 1);
    CHECK(a.passed());
    CHECK(a.lipschitz_estimate <= a.lipschitz_weyl_bound * (1 + 1e-12));
  }
}

TEST_CASE("trilinear maps: symmetry, tensor round trip and norm bound") {
  const SystemSpec kg = builtin_klein_gordon(1.0, testing::kg_M());
  CHECK(kg.T.is_symmetric());
  CHECK_FALSE(builtin_maxwell_lorentz_1d().T.is_zero());
  CHECK(builtin_maxwell_lorentz_1d().T.is_symmetric());
  CHECK(Trilinear::zero(3).is_zero());

  const Trilinear dense = Trilinear::from_tensor(2, kg.T.coefficients());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    CVec a(2), b(2), c(2);
    for (int i = 0; i < 2; ++i) {
      a[i] = {g(rng), g(rng)};
      b[i] = {g(rng), g(rng)};
      c[i] = {g(rng), g(rng)};
    }
    CHECK((dense(a, b, c) - kg.T(a, b, c)).norm() < 1e-14 * (1 + kg.T(a, b, c).norm()));
    cplx fast[2];
    kg.T.cubic(a.data(), fast);
    const CVec slow = kg.T(a, a, a);
    CHECK(std::abs(fast[0] - slow[0]) + std::abs(fast[1] - slow[1]) < 1e-13 * (1 + slow.norm()));
  }
  CHECK(kg.T.sampled_norm(2000, 3) <= kg.T.norm_bound());

  // u0 * u1 * u1 in the first slot only: not symmetric
  std::vector<double> t(16, 0.0);
  t[0 * 8 + 0 * 4 + 1 * 2 + 1] = 1.0;
  CHECK_FALSE(Trilinear::from_tensor(2, t).is_symmetric());
}

TEST_CASE("structural validation rejects bad systems") {
  SystemSpec s = builtin_klein_gordon(1.0, testing::kg_M());
  s.A[0](0, 1) = 2.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = builtin_klein_gordon(1.0, testing::kg_M());
  s.E(0, 1) = 5.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  RMat sym(2, 2);
  sym << 1, 0, 0, 1;
  CHECK_THROWS_AS(builtin_klein_gordon(1.0, sym), ValidationError);
  CHECK_THROWS_AS(builtin_klein_gordon(0.0, testing::kg_M()), ValidationError);
}

TEST_CASE("two-dimensional kernel is reported with its dimension") {
  SystemSpec s;
  s.n = 2;
  s.A = {RMat::Zero(2, 2)};
  s.E = RMat::Zero(2, 2);
  s.T = Trilinear::zero(2);
  // A(kappa) - iE = 0 has no positive eigenvalue; pick index 0 so omega = 0 and ker L = C^2
  BranchSelector sel{BranchSelector::Kind::index, 0};
  try {
    find_dispersion(s, 1.0, sel);
    FAIL("expected KernelDimensionError");
  } catch (const KernelDimensionError& e) {
    CHECK(e.dimension == 2);
  }
}

TEST_CASE("phase normalization") {
  CVec v(3);
  v << cplx(0.1, 0.2), cplx(0.0, -3.0), cplx(1.0, 1.0);
  fix_phase(v);
  CHECK(phase_pivot(v) == 1);
  CHECK(v[1].real() > 0.0);
  CHECK(std::abs(v[1].imag()) < 1e-15);
  // ties go to the lowest index
  CVec w(2);
  w << cplx(0.0, 1.0), cplx(-1.0, 0.0);
  fix_phase(w);
  CHECK(phase_pivot(w) == 0);
  CHECK(w[0] == cplx(1.0, 0.0));
}

TEST_CASE("profile polarization and decay are validated") {
  const auto pb = testing::kg_problem();
  EnvelopeProfile p = pb->profile;
  CHECK_NOTHROW(p.validate(pb->disp, 64 * kPi));
  p.width = 60.0;  // does not decay on the torus
  CHECK_THROWS_AS(p.validate(pb->disp, 64 * kPi), ValidationError);
  p = pb->profile;
  p.polarization = CVec::Unit(2, 0);
  CHECK_THROWS_AS(p.validate(pb->disp, 64 * kPi), ValidationError);
}

}
