#include "envelope/kernels.hpp"

#include <cmath>

namespace envelope::kernels {
namespace {

void check_dim(int n) {
  if (n > kMaxN) throw ValidationError("kernels: state dimension above 16 is not supported");
}

template <bool Parallel, int Fixed>
void accumulate_trilinear_n(const Trilinear& T, int n_rt, int points, std::span<const cplx* const> sources,
                            std::span<const TripleTerm> terms, cplx* out) {
  constexpr int Cap = Fixed > 0 ? Fixed : kMaxN;
  const int n = Fixed > 0 ? Fixed : n_rt;
  const std::size_t stride = static_cast<std::size_t>(points);
#pragma omp parallel for schedule(static) if (Parallel)
  for (int j = 0; j < points; ++j) {
    cplx a[Cap], b[Cap], c[Cap], t[Cap], acc[Cap];
    for (int q = 0; q < n; ++q) acc[q] = 0.0;
    for (const TripleTerm& term : terms) {
      const cplx* sa = sources[term.src[0]];
      const cplx* sb = sources[term.src[1]];
      const cplx* sc = sources[term.src[2]];
      for (int q = 0; q < n; ++q) {
        const std::size_t o = q * stride + j;
        a[q] = term.conj[0] ? std::conj(sa[o]) : sa[o];
        b[q] = term.conj[1] ? std::conj(sb[o]) : sb[o];
        c[q] = term.conj[2] ? std::conj(sc[o]) : sc[o];
      }
      T(a, b, c, t);
      if (term.weight == 1.0) {
        for (int q = 0; q < n; ++q) acc[q] += t[q];
      } else {
        for (int q = 0; q < n; ++q) acc[q] += term.weight * t[q];
      }
    }
    for (int q = 0; q < n; ++q) out[q * stride + j] = acc[q];
  }
}

template <bool Parallel>
void accumulate_trilinear_impl(const Trilinear& T, int n, int points, std::span<const cplx* const> sources,
                               std::span<const TripleTerm> terms, cplx* out) {
  check_dim(n);
  switch (n) {
    case 2: accumulate_trilinear_n<Parallel, 2>(T, n, points, sources, terms, out); break;
    case 4: accumulate_trilinear_n<Parallel, 4>(T, n, points, sources, terms, out); break;
    default: accumulate_trilinear_n<Parallel, 0>(T, n, points, sources, terms, out); break;
  }
}

// Fixed > 0 unrolls for that state dimension; Fixed == 0 handles any n <= kMaxN.
template <bool Parallel, int Fixed>
void apply_per_mode_n(const cplx* mats, int n_rt, cplx* v, int modes) {
  const int n = Fixed > 0 ? Fixed : n_rt;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < modes; ++i) {
    const cplx* M = mats + i * nn;
    cplx* x = v + static_cast<std::size_t>(i) * n;
    cplx y[Fixed > 0 ? Fixed : kMaxN];
    for (int r = 0; r < n; ++r) y[r] = M[r] * x[0];
    for (int c = 1; c < n; ++c) {
      const cplx xc = x[c];
      for (int r = 0; r < n; ++r) y[r] += M[c * n + r] * xc;
    }
    for (int r = 0; r < n; ++r) x[r] = y[r];
  }
}

template <bool Parallel>
void apply_per_mode_impl(std::span<const cplx> mats, int n, std::span<cplx> v) {
  check_dim(n);
  const int modes = static_cast<int>(v.size() / n);
  switch (n) {
    case 2: apply_per_mode_n<Parallel, 2>(mats.data(), n, v.data(), modes); break;
    case 4: apply_per_mode_n<Parallel, 4>(mats.data(), n, v.data(), modes); break;
    default: apply_per_mode_n<Parallel, 0>(mats.data(), n, v.data(), modes); break;
  }
}

template <bool Parallel>
void apply_phases_impl(std::span<const double> lambda, double t_over_eps, std::span<cplx> v, bool conjugate) {
  const double sign = conjugate ? -1.0 : 1.0;
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t q = 0; q < total; ++q) {
    const double phi = sign * t_over_eps * lambda[q];
    v[q] *= cplx(std::cos(phi), std::sin(phi));
  }
}

template <bool Parallel, int Fixed>
void rk4_pointwise_n(const Trilinear& T, int n_rt, int points, double h, double scale, cplx* u) {
  constexpr int Cap = Fixed > 0 ? Fixed : kMaxN;
  const int n = Fixed > 0 ? Fixed : n_rt;
  const std::size_t stride = static_cast<std::size_t>(points);
  const double h2 = 0.5 * h * scale, h1 = h * scale, h6 = h * scale / 6.0;
#pragma omp parallel for schedule(static) if (Parallel)
  for (int j = 0; j < points; ++j) {
    cplx y[Cap], k[Cap], w[Cap], sum[Cap];
    for (int q = 0; q < n; ++q) y[q] = u[q * stride + j];
    T.cubic(y, k);
    for (int q = 0; q < n; ++q) {
      sum[q] = k[q];
      w[q] = y[q] + h2 * k[q];
    }
    T.cubic(w, k);
    for (int q = 0; q < n; ++q) {
      sum[q] += 2.0 * k[q];
      w[q] = y[q] + h2 * k[q];
    }
    T.cubic(w, k);
    for (int q = 0; q < n; ++q) {
      sum[q] += 2.0 * k[q];
      w[q] = y[q] + h1 * k[q];
    }
    T.cubic(w, k);
    for (int q = 0; q < n; ++q) u[q * stride + j] = y[q] + h6 * (sum[q] + k[q]);
  }
}

template <bool Parallel>
void rk4_pointwise_impl(const Trilinear& T, int n, int points, double h, double scale, cplx* u) {
  check_dim(n);
  switch (n) {
    case 2: rk4_pointwise_n<Parallel, 2>(T, n, points, h, scale, u); break;
    case 4: rk4_pointwise_n<Parallel, 4>(T, n, points, h, scale, u); break;
    default: rk4_pointwise_n<Parallel, 0>(T, n, points, h, scale, u); break;
  }
}

template <bool Parallel, int Fixed>
void cubic_pointwise_n(const Trilinear& T, int n_rt, int points, double scale, cplx* u) {
  constexpr int Cap = Fixed > 0 ? Fixed : kMaxN;
  const int n = Fixed > 0 ? Fixed : n_rt;
  const std::size_t stride = static_cast<std::size_t>(points);
#pragma omp parallel for schedule(static) if (Parallel)
  for (int j = 0; j < points; ++j) {
    cplx y[Cap], t[Cap];
    for (int q = 0; q < n; ++q) y[q] = u[q * stride + j];
    T.cubic(y, t);
    for (int q = 0; q < n; ++q) u[q * stride + j] = scale * t[q];
  }
}

template <bool Parallel>
void cubic_pointwise_impl(const Trilinear& T, int n, int points, double scale, cplx* u) {
  check_dim(n);
  switch (n) {
    case 2: cubic_pointwise_n<Parallel, 2>(T, n, points, scale, u); break;
    case 4: cubic_pointwise_n<Parallel, 4>(T, n, points, scale, u); break;
    default: cubic_pointwise_n<Parallel, 0>(T, n, points, scale, u); break;
  }
}

}  // namespace

namespace serial {
void cubic_pointwise(const Trilinear& T, int n, int points, double scale, cplx* u) {
  cubic_pointwise_impl<false>(T, n, points, scale, u);
}
void accumulate_trilinear(const Trilinear& T, int n, int points, std::span<const cplx* const> sources,
                          std::span<const TripleTerm> terms, cplx* out) {
  accumulate_trilinear_impl<false>(T, n, points, sources, terms, out);
}
void apply_per_mode(std::span<const cplx> mats, int n, std::span<cplx> v) { apply_per_mode_impl<false>(mats, n, v); }
void apply_phases(std::span<const double> lambda, double t_over_eps, std::span<cplx> v, bool conjugate) {
  apply_phases_impl<false>(lambda, t_over_eps, v, conjugate);
}
void rk4_pointwise(const Trilinear& T, int n, int points, double h, double scale, cplx* u) {
  rk4_pointwise_impl<false>(T, n, points, h, scale, u);
}
}  // namespace serial

namespace omp {
void cubic_pointwise(const Trilinear& T, int n, int points, double scale, cplx* u) {
  cubic_pointwise_impl<true>(T, n, points, scale, u);
}
void accumulate_trilinear(const Trilinear& T, int n, int points, std::span<const cplx* const> sources,
                          std::span<const TripleTerm> terms, cplx* out) {
  accumulate_trilinear_impl<true>(T, n, points, sources, terms, out);
}
void apply_per_mode(std::span<const cplx> mats, int n, std::span<cplx> v) { apply_per_mode_impl<true>(mats, n, v); }
void apply_phases(std::span<const double> lambda, double t_over_eps, std::span<cplx> v, bool conjugate) {
  apply_phases_impl<true>(lambda, t_over_eps, v, conjugate);
}
void rk4_pointwise(const Trilinear& T, int n, int points, double h, double scale, cplx* u) {
  rk4_pointwise_impl<true>(T, n, points, h, scale, u);
}
}  // namespace omp

void accumulate_trilinear(const Trilinear& T, int n, int points, std::span<const cplx* const> sources,
                          std::span<const TripleTerm> terms, cplx* out, Exec exec) {
  if (exec == Exec::parallel) {
    omp::accumulate_trilinear(T, n, points, sources, terms, out);
  } else {
    serial::accumulate_trilinear(T, n, points, sources, terms, out);
  }
}

void apply_per_mode(std::span<const cplx> mats, int n, std::span<cplx> v, Exec exec) {
  if (exec == Exec::parallel) {
    omp::apply_per_mode(mats, n, v);
  } else {
    serial::apply_per_mode(mats, n, v);
  }
}

void apply_phases(std::span<const double> lambda, double t_over_eps, std::span<cplx> v, bool conjugate, Exec exec) {
  if (exec == Exec::parallel) {
    omp::apply_phases(lambda, t_over_eps, v, conjugate);
  } else {
    serial::apply_phases(lambda, t_over_eps, v, conjugate);
  }
}

void rk4_pointwise(const Trilinear& T, int n, int points, double h, double scale, cplx* u, Exec exec) {
  if (exec == Exec::parallel) {
    omp::rk4_pointwise(T, n, points, h, scale, u);
  } else {
    serial::rk4_pointwise(T, n, points, h, scale, u);
  }
}

void cubic_pointwise(const Trilinear& T, int n, int points, double scale, cplx* u, Exec exec) {
  if (exec == Exec::parallel) {
    omp::cubic_pointwise(T, n, points, scale, u);
  } else {
    serial::cubic_pointwise(T, n, points, scale, u);
  }
}

}  // namespace envelope::kernels
