#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "envelope/kernels.hpp"
#include "helpers.hpp"

using namespace envelope;

namespace {

std::vector<cplx> values(std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(count);
  for (auto& c : v) c = {g(rng), g(rng)};
  return v;
}

struct Threads {
  int saved = omp_get_max_threads();
  Threads() { omp_set_num_threads(4); }
  ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("serial and OpenMP kernels agree bitwise") {
  Threads threads;
  for (const SystemSpec& s : {builtin_klein_gordon(1.0, testing::kg_M()), builtin_maxwell_lorentz_1d()}) {
    const int n = s.n, points = 1000;
    const auto a = values(n * points, 1), b = values(n * points, 2);
    const std::vector<const cplx*> src{a.data(), b.data()};
    const std::vector<TripleTerm> terms{{{0, 0, 1}, {false, true, false}, 3.0}, {{1, 1, 1}, {true, true, true}, 1.0}};
    std::vector<cplx> o1(n * points), o2(n * points);
    kernels::accumulate_trilinear(s.T, n, points, src, terms, o1.data(), Exec::serial);
    kernels::accumulate_trilinear(s.T, n, points, src, terms, o2.data(), Exec::parallel);
    CHECK(o1 == o2);

    auto u1 = a, u2 = a;
    kernels::rk4_pointwise(s.T, n, points, 0.01, 0.3, u1.data(), Exec::serial);
    kernels::rk4_pointwise(s.T, n, points, 0.01, 0.3, u2.data(), Exec::parallel);
    CHECK(u1 == u2);

    const auto mats = values(static_cast<std::size_t>(n) * n * points, 3);
    auto v1 = b, v2 = b;
    kernels::apply_per_mode(mats, n, v1, Exec::serial);
    kernels::apply_per_mode(mats, n, v2, Exec::parallel);
    CHECK(v1 == v2);

    std::vector<double> lam(n * points);
    for (std::size_t q = 0; q < lam.size(); ++q) lam[q] = 0.01 * static_cast<double>(q);
    auto p1 = b, p2 = b;
    kernels::apply_phases(lam, 1.7, p1, true, Exec::serial);
    kernels::apply_phases(lam, 1.7, p2, true, Exec::parallel);
    CHECK(p1 == p2);
  }
}

TEST_CASE("general-n path matches the unrolled paths") {
  // n = 3 goes through the generic loop; embed KG in the first two components
  const SystemSpec kg = builtin_klein_gordon(1.0, testing::kg_M());
  const auto coeffs2 = kg.T.coefficients();
  std::vector<double> c3(81, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) c3[((i * 3 + j) * 3 + k) * 3 + l] = coeffs2[((i * 2 + j) * 2 + k) * 2 + l];
  const Trilinear T3 = Trilinear::from_tensor(3, c3);
  const int points = 50;
  auto u2 = values(2 * points, 9);
  std::vector<cplx> u3(3 * points, cplx{});
  std::copy(u2.begin(), u2.end(), u3.begin());
  kernels::rk4_pointwise(kg.T, 2, points, 0.05, 1.0, u2.data(), Exec::serial);
  kernels::rk4_pointwise(T3, 3, points, 0.05, 1.0, u3.data(), Exec::serial);
  for (int q = 0; q < 2 * points; ++q) CHECK(std::abs(u2[q] - u3[q]) < 1e-12 * (1 + std::abs(u2[q])));
  for (int q = 2 * points; q < 3 * points; ++q) CHECK(u3[q] == cplx{});
}

TEST_CASE("pointwise RK4 against the exact rotation flow") {
  // u' = s (u.u) M u with M skew keeps u.u fixed, so u(t) = R(s (u.u) t) u0
  const SystemSpec kg = builtin_klein_gordon(1.0, testing::kg_M());
  const cplx u0[2] = {cplx(0.3, 0.1), cplx(-0.2, 0.25)};
  const cplx c = u0[0] * u0[0] + u0[1] * u0[1];
  const double s = 0.8, t = 2.0;
  auto run = [&](int steps) {
    cplx u[2] = {u0[0], u0[1]};
    for (int q = 0; q < steps; ++q) kernels::rk4_pointwise(kg.T, 2, 1, t / steps, s, u, Exec::serial);
    const cplx th = s * c * t;
    const cplx e0 = std::cos(th) * u0[0] - std::sin(th) * u0[1];
    const cplx e1 = std::sin(th) * u0[0] + std::cos(th) * u0[1];
    return std::abs(u[0] - e0) + std::abs(u[1] - e1);
  };
  const double e1 = run(10), e2 = run(20);
  CHECK(e1 < 1e-8);
  CHECK(e1 / e2 > 12.0);  // fourth order
}

TEST_CASE("dimension cap") {
  const Trilinear big = Trilinear::zero(kernels::kMaxN + 1);
  std::vector<cplx> u(kernels::kMaxN + 1);
  CHECK_THROWS_AS(kernels::rk4_pointwise(big, kernels::kMaxN + 1, 1, 0.1, 1.0, u.data(), Exec::serial),
                  ValidationError);
}

}
