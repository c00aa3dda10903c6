#pragma once

#include <memory>
#include <span>
#include <vector>

#include "envelope/kernels.hpp"
#include "envelope/system_model.hpp"
#include "envelope/types.hpp"

namespace envelope {

// Periodic grid on [-L/2, L/2) standing in for the real line.
// Modes m in [-N/2, N/2), wavenumber k_m = m * dk with dk = 2 pi / L.
struct Grid {
  double L = 0.0;
  int N = 0;

  Grid() = default;
  Grid(double length, int modes);

  double dk() const { return 2.0 * kPi / L; }
  int mode(int i) const { return i - N / 2; }
  int index(int m) const { return m + N / 2; }
  bool contains(int m) const { return m >= -N / 2 && m < N / 2; }
  double k(int i) const { return mode(i) * dk(); }
  double x(int j, int samples) const { return -0.5 * L + j * L / samples; }
  double x(int j) const { return x(j, N); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

enum class Representation { u_hat, z };

// One C^n vector per retained mode, stored mode-major in centered order.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(Grid grid, int n, Representation rep = Representation::u_hat);

  const Grid& grid() const { return grid_; }
  int n() const { return n_; }
  int size() const { return grid_.N; }
  Representation rep() const { return rep_; }
  void set_rep(Representation r) { rep_ = r; }

  Eigen::Map<CVec> at(int i) { return {coeffs_.data() + static_cast<std::size_t>(i) * n_, n_}; }
  Eigen::Map<const CVec> at(int i) const { return {coeffs_.data() + static_cast<std::size_t>(i) * n_, n_}; }
  std::span<cplx> data() { return coeffs_; }
  std::span<const cplx> data() const { return coeffs_; }

  void set_zero();
  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx s);
  double max_abs() const;

 private:
  Grid grid_;
  int n_ = 0;
  Representation rep_ = Representation::u_hat;
  std::vector<cplx> coeffs_;
};

// Samples of an n-vector field on `points` equispaced nodes, component-major.
struct PhysicalField {
  int n = 0;
  int points = 0;
  std::vector<cplx> values;

  PhysicalField() = default;
  PhysicalField(int n_, int points_) : n(n_), points(points_), values(static_cast<std::size_t>(n_) * points_) {}
  cplx* component(int c) { return values.data() + static_cast<std::size_t>(c) * points; }
  const cplx* component(int c) const { return values.data() + static_cast<std::size_t>(c) * points; }
  CVec point(int j) const;
};

// In-place complex FFT of fixed size on an owned aligned buffer. Plans are
// created under a global lock; one instance per worker thread.
class Fft {
 public:
  explicit Fft(int size);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return size_; }
  cplx* buffer() { return buf_; }
  void forward();   // e^{-2 pi i m j / M}, unnormalized
  void backward();  // e^{+2 pi i m j / M}, unnormalized

 private:
  int size_;
  cplx* buf_;
  void* fwd_;
  void* bwd_;
};

// Cache of Fft objects keyed by size; not shared between threads.
class FftCache {
 public:
  Fft& get(int size);

 private:
  std::vector<std::unique_ptr<Fft>> ffts_;
};

// Spectral coefficients -> samples on `points` >= N nodes (zero padding when larger).
PhysicalField inverse_fft(const SpectralField& f, int points, FftCache& cache);
PhysicalField inverse_fft(const SpectralField& f);
// Samples -> coefficients on `grid` (truncating when there are more samples than modes).
SpectralField forward_fft(const PhysicalField& u, const Grid& grid, FftCache& cache);
SpectralField forward_fft(const PhysicalField& u, const Grid& grid);

// Same transforms for fields that are real in physical space: two components share
// one complex FFT. Imaginary parts of the samples are ignored on the way back.
PhysicalField inverse_fft_real(const SpectralField& f, int points, FftCache& cache);
SpectralField forward_fft_real(const PhysicalField& u, const Grid& grid, FftCache& cache);

double wiener_norm(const SpectralField& f);
double ws_norm(const SpectralField& f, int s);
SpectralField apply_Dmu(const SpectralField& f);

// Dealiased pseudospectral F(T(u1, u2, u3)) on the retained modes (2N padding).
SpectralField trilinear_conv(const SystemSpec& spec, const SpectralField& f1, const SpectralField& f2,
                             const SpectralField& f3, FftCache& cache, Exec exec = Exec::parallel);
SpectralField trilinear_conv(const SystemSpec& spec, const SpectralField& f1, const SpectralField& f2,
                             const SpectralField& f3);

// Direct triple sum over m1 + m2 + m3 = m within the band. O(N^3); N <= 32.
SpectralField trilinear_conv_direct(const SystemSpec& spec, const SpectralField& f1, const SpectralField& f2,
                                    const SpectralField& f3);

// C_T / (2 pi) with C_T from Trilinear::norm_bound.
double trilinear_conv_constant(const SystemSpec& spec);

}  // namespace envelope
