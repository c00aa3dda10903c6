#include "envelope/spectral.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <mutex>

namespace envelope {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* what) {
  if (!(a.grid() == b.grid()) || a.n() != b.n()) {
    throw ValidationError(std::string(what) + ": grid mismatch");
  }
}

// (-1)^m for the shift of the sample origin to -L/2.
double parity(int m) { return (m & 1) ? -1.0 : 1.0; }

}  // namespace

Grid::Grid(double length, int modes) : L(length), N(modes) {
  if (!(length > 0.0)) throw ValidationError("grid: length must be positive");
  if (!is_power_of_two(modes) || modes < 2) throw ValidationError("grid: N must be a power of two >= 2");
}

SpectralField::SpectralField(Grid grid, int n, Representation rep)
    : grid_(grid), n_(n), rep_(rep), coeffs_(static_cast<std::size_t>(grid.N) * n) {}

void SpectralField::set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), cplx{}); }

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "field +=");
  for (std::size_t q = 0; q < coeffs_.size(); ++q) coeffs_[q] += o.coeffs_[q];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "field -=");
  for (std::size_t q = 0; q < coeffs_.size(); ++q) coeffs_[q] -= o.coeffs_[q];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

CVec PhysicalField::point(int j) const {
  CVec v(n);
  for (int c = 0; c < n; ++c) v[c] = component(c)[j];
  return v;
}

Fft::Fft(int size) : size_(size) {
  if (size <= 0) throw ValidationError("fft: size must be positive");
  std::lock_guard lock(planner_mutex());
  buf_ = reinterpret_cast<cplx*>(fftw_alloc_complex(size));
  auto* b = reinterpret_cast<fftw_complex*>(buf_);
  fwd_ = fftw_plan_dft_1d(size, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(size, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(buf_);
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void Fft::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

Fft& FftCache::get(int size) {
  for (auto& f : ffts_) {
    if (f->size() == size) return *f;
  }
  ffts_.push_back(std::make_unique<Fft>(size));
  return *ffts_.back();
}

PhysicalField inverse_fft(const SpectralField& f, int points, FftCache& cache) {
  const Grid& g = f.grid();
  if (points < g.N || points % 2 != 0) throw ValidationError("inverse_fft: need an even sample count >= N");
  const int n = f.n();
  PhysicalField out(n, points);
  Fft& fft = cache.get(points);
  cplx* buf = fft.buffer();
  const double scale = g.dk() / std::sqrt(2.0 * kPi);
  for (int c = 0; c < n; ++c) {
    std::fill(buf, buf + points, cplx{});
    for (int i = 0; i < g.N; ++i) {
      const int m = g.mode(i);
      buf[(m + points) % points] = f.at(i)[c] * (parity(m) * scale);
    }
    fft.backward();
    std::copy(buf, buf + points, out.component(c));
  }
  return out;
}

PhysicalField inverse_fft(const SpectralField& f) {
  FftCache cache;
  return inverse_fft(f, f.grid().N, cache);
}

SpectralField forward_fft(const PhysicalField& u, const Grid& grid, FftCache& cache) {
  const int points = u.points;
  if (points < grid.N || points % 2 != 0) throw ValidationError("forward_fft: need an even sample count >= N");
  SpectralField out(grid, u.n);
  Fft& fft = cache.get(points);
  cplx* buf = fft.buffer();
  const double scale = grid.L / points / std::sqrt(2.0 * kPi);
  for (int c = 0; c < u.n; ++c) {
    std::copy(u.component(c), u.component(c) + points, buf);
    fft.forward();
    for (int i = 0; i < grid.N; ++i) {
      const int m = grid.mode(i);
      out.at(i)[c] = buf[(m + points) % points] * (parity(m) * scale);
    }
  }
  return out;
}

SpectralField forward_fft(const PhysicalField& u, const Grid& grid) {
  FftCache cache;
  return forward_fft(u, grid, cache);
}

PhysicalField inverse_fft_real(const SpectralField& f, int points, FftCache& cache) {
  const Grid& g = f.grid();
  if (points < g.N || points % 2 != 0) throw ValidationError("inverse_fft: need an even sample count >= N");
  const int n = f.n();
  PhysicalField out(n, points);
  Fft& fft = cache.get(points);
  cplx* buf = fft.buffer();
  const double scale = g.dk() / std::sqrt(2.0 * kPi);
  for (int c = 0; c < n; c += 2) {
    const bool pair = c + 1 < n;
    std::fill(buf, buf + points, cplx{});
    for (int i = 0; i < g.N; ++i) {
      const int m = g.mode(i);
      const cplx v = pair ? f.at(i)[c] + kI * f.at(i)[c + 1] : f.at(i)[c];
      buf[(m + points) % points] = v * (parity(m) * scale);
    }
    fft.backward();
    cplx* a = out.component(c);
    for (int j = 0; j < points; ++j) a[j] = buf[j].real();
    if (pair) {
      cplx* b = out.component(c + 1);
      for (int j = 0; j < points; ++j) b[j] = buf[j].imag();
    }
  }
  return out;
}

SpectralField forward_fft_real(const PhysicalField& u, const Grid& grid, FftCache& cache) {
  const int points = u.points;
  if (points < grid.N || points % 2 != 0) throw ValidationError("forward_fft: need an even sample count >= N");
  SpectralField out(grid, u.n);
  Fft& fft = cache.get(points);
  cplx* buf = fft.buffer();
  const double scale = grid.L / points / std::sqrt(2.0 * kPi);
  for (int c = 0; c < u.n; c += 2) {
    const bool pair = c + 1 < u.n;
    const cplx* a = u.component(c);
    const cplx* b = pair ? u.component(c + 1) : nullptr;
    for (int j = 0; j < points; ++j) buf[j] = pair ? cplx(a[j].real(), b[j].real()) : cplx(a[j].real(), 0.0);
    fft.forward();
    for (int i = 0; i < grid.N; ++i) {
      const int m = grid.mode(i);
      const cplx F = buf[(m + points) % points];
      const cplx G = std::conj(buf[(points - m) % points]);
      const double w = parity(m) * scale;
      out.at(i)[c] = 0.5 * (F + G) * w;
      if (pair) out.at(i)[c + 1] = cplx(0.0, -0.5) * (F - G) * w;
    }
  }
  return out;
}

double wiener_norm(const SpectralField& f) {
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i) sum += f.at(i).norm();
  return sum * f.grid().dk();
}

double ws_norm(const SpectralField& f, int s) {
  if (s < 0 || s > 2) throw ValidationError("ws_norm: only s in {0, 1, 2} is supported");
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const double ak = std::abs(f.grid().k(i));
    const double a = f.at(i).norm();
    double w = 1.0, kp = 1.0;
    for (int q = 1; q <= s; ++q) {
      kp *= ak;
      w += kp;
    }
    sum += w * a;
  }
  return sum * f.grid().dk();
}

SpectralField apply_Dmu(const SpectralField& f) {
  SpectralField out = f;
  for (int i = 0; i < f.size(); ++i) out.at(i) *= kI * f.grid().k(i);
  return out;
}

SpectralField trilinear_conv(const SystemSpec& spec, const SpectralField& f1, const SpectralField& f2,
                             const SpectralField& f3, FftCache& cache, Exec exec) {
  require_same_grid(f1, f2, "trilinear_conv");
  require_same_grid(f1, f3, "trilinear_conv");
  const int M = 2 * f1.grid().N;
  const PhysicalField u1 = inverse_fft(f1, M, cache);
  const PhysicalField u2 = inverse_fft(f2, M, cache);
  const PhysicalField u3 = inverse_fft(f3, M, cache);
  PhysicalField prod(spec.n, M);
  const std::array<const cplx*, 3> sources{u1.values.data(), u2.values.data(), u3.values.data()};
  const std::array<TripleTerm, 1> terms{TripleTerm{{0, 1, 2}, {false, false, false}}};
  kernels::accumulate_trilinear(spec.T, spec.n, M, sources, terms, prod.values.data(), exec);
  return forward_fft(prod, f1.grid(), cache);
}

SpectralField trilinear_conv(const SystemSpec& spec, const SpectralField& f1, const SpectralField& f2,
                             const SpectralField& f3) {
  FftCache cache;
  return trilinear_conv(spec, f1, f2, f3, cache);
}

SpectralField trilinear_conv_direct(const SystemSpec& spec, const SpectralField& f1, const SpectralField& f2,
                                    const SpectralField& f3) {
  require_same_grid(f1, f2, "trilinear_conv_direct");
  require_same_grid(f1, f3, "trilinear_conv_direct");
  const Grid& g = f1.grid();
  if (g.N > 32) throw ValidationError("trilinear_conv_direct: N must be <= 32");
  const int n = spec.n;
  SpectralField out(g, n);
  const double w = g.dk() * g.dk() / (2.0 * kPi);
  CVec t(n);
  for (int i = 0; i < g.N; ++i) {
    const int m = g.mode(i);
    CVec acc = CVec::Zero(n);
    for (int i1 = 0; i1 < g.N; ++i1) {
      for (int i2 = 0; i2 < g.N; ++i2) {
        const int m3 = m - g.mode(i1) - g.mode(i2);
        if (!g.contains(m3)) continue;
        const CVec a = f1.at(i1), b = f2.at(i2), c = f3.at(g.index(m3));
        spec.T(a.data(), b.data(), c.data(), t.data());
        acc += t;
      }
    }
    out.at(i) = w * acc;
  }
  return out;
}

double trilinear_conv_constant(const SystemSpec& spec) { return spec.T.norm_bound() / (2.0 * kPi); }

}  // namespace envelope
