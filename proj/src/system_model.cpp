#include "envelope/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace envelope {

Trilinear Trilinear::from_tensor(int n, std::vector<double> coeffs) {
  if (n <= 0) throw ValidationError("trilinear: dimension must be positive");
  const std::size_t expected = static_cast<std::size_t>(n) * n * n * n;
  if (coeffs.size() != expected) {
    std::ostringstream os;
    os << "trilinear: tensor has " << coeffs.size() << " coefficients, expected n^4 = " << expected;
    throw ValidationError(os.str());
  }
  Trilinear t;
  t.n_ = n;
  t.zero_ = std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return v == 0.0; });
  t.fn_ = [n, c = std::move(coeffs)](const cplx* a, const cplx* b, const cplx* cc, cplx* out) {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const cplx ab = a[j] * b[k];
          for (int l = 0; l < n; ++l, ++idx) {
            if (c[idx] != 0.0) acc += c[idx] * ab * cc[l];
          }
        }
      }
      out[i] = acc;
    }
  };
  return t;
}

Trilinear Trilinear::from_callable(int n, Fn fn, CubicFn cubic) {
  if (n <= 0) throw ValidationError("trilinear: dimension must be positive");
  if (!fn) throw ValidationError("trilinear: empty callable");
  Trilinear t;
  t.n_ = n;
  t.fn_ = std::move(fn);
  t.cubic_ = std::move(cubic);
  return t;
}

Trilinear Trilinear::zero(int n) {
  Trilinear t = from_callable(n, [n](const cplx*, const cplx*, const cplx*, cplx* out) {
    std::fill(out, out + n, cplx{});
  });
  t.zero_ = true;
  return t;
}

CVec Trilinear::operator()(const CVec& a, const CVec& b, const CVec& c) const {
  CVec out(n_);
  fn_(a.data(), b.data(), c.data(), out.data());
  return out;
}

std::vector<double> Trilinear::coefficients() const {
  const int n = n_;
  std::vector<double> coeffs(static_cast<std::size_t>(n) * n * n * n, 0.0);
  CVec ej = CVec::Zero(n), ek = CVec::Zero(n), el = CVec::Zero(n), out(n);
  for (int j = 0; j < n; ++j) {
    ej.setZero();
    ej[j] = 1.0;
    for (int k = 0; k < n; ++k) {
      ek.setZero();
      ek[k] = 1.0;
      for (int l = 0; l < n; ++l) {
        el.setZero();
        el[l] = 1.0;
        fn_(ej.data(), ek.data(), el.data(), out.data());
        for (int i = 0; i < n; ++i) {
          coeffs[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l] = out[i].real();
        }
      }
    }
  }
  return coeffs;
}

bool Trilinear::is_symmetric(double rel_tol) const {
  const std::vector<double> c = coefficients();
  const int n = n_;
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  auto at = [&](int i, int j, int k, int l) { return c[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          const double v = at(i, j, k, l);
          const double tol = rel_tol * scale;
          if (std::abs(v - at(i, k, j, l)) > tol || std::abs(v - at(i, j, l, k)) > tol ||
              std::abs(v - at(i, l, k, j)) > tol) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

double Trilinear::norm_bound() const {
  double sum = 0.0;
  for (double c : coefficients()) sum += c * c;
  return std::sqrt(sum);
}

double Trilinear::sampled_norm(int samples, unsigned seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto draw = [&] {
    CVec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = cplx(g(rng), g(rng));
    return CVec(v / v.norm());
  };
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CVec a = draw(), b = draw(), c = draw();
    best = std::max(best, (*this)(a, b, c).norm());
  }
  return best;
}

void SystemSpec::validate() const {
  if (d != 1) throw ValidationError("system: only d = 1 is supported");
  if (n <= 0) throw ValidationError("system: n must be positive");
  if (static_cast<int>(A.size()) != d) throw ValidationError("system: need exactly d matrices A_l");
  for (std::size_t l = 0; l < A.size(); ++l) {
    if (A[l].rows() != n || A[l].cols() != n) throw ValidationError("system: A has wrong shape");
    if ((A[l] - A[l].transpose()).cwiseAbs().maxCoeff() != 0.0) {
      throw ValidationError("system: A_" + std::to_string(l + 1) + " is not symmetric");
    }
  }
  if (E.rows() != n || E.cols() != n) throw ValidationError("system: E has wrong shape");
  if ((E + E.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw ValidationError("system: E is not skew-symmetric");
  }
  if (T.dim() != n) throw ValidationError("system: trilinear map has wrong dimension");
}

RMat assemble_A(const SystemSpec& spec, std::span<const double> beta) {
  if (static_cast<int>(beta.size()) != spec.d) throw ValidationError("assemble_A: beta has wrong dimension");
  RMat out = RMat::Zero(spec.n, spec.n);
  for (int l = 0; l < spec.d; ++l) out += beta[l] * spec.A[l];
  return out;
}

CMat assemble_L(const SystemSpec& spec, double alpha, std::span<const double> beta) {
  CMat L = assemble_A(spec, beta).cast<cplx>();
  L.diagonal().array() -= alpha;
  L -= kI * spec.E.cast<cplx>();
  return L;
}

CMat assemble_L(const SystemSpec& spec, double alpha, double beta) {
  return assemble_L(spec, alpha, std::span<const double>(&beta, 1));
}

CVec eval_T(const SystemSpec& spec, const CVec& a, const CVec& b, const CVec& c) {
  if (a.size() != spec.n || b.size() != spec.n || c.size() != spec.n) {
    throw ValidationError("eval_T: vectors must have length n");
  }
  return spec.T(a, b, c);
}

SystemSpec builtin_klein_gordon(double nu, const RMat& M) {
  if (nu == 0.0) throw ValidationError("klein_gordon: nu must be nonzero");
  if (M.rows() != 2 || M.cols() != 2) throw ValidationError("klein_gordon: M must be 2 x 2 for d = 1");
  if ((M + M.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw ValidationError("klein_gordon: M is not skew-symmetric");
  }
  SystemSpec s;
  s.d = 1;
  s.n = 2;
  s.name = "klein_gordon";
  RMat A1(2, 2);
  A1 << 0.0, 1.0, 1.0, 0.0;
  s.A = {A1};
  s.E.resize(2, 2);
  s.E << 0.0, -nu, nu, 0.0;
  // Symmetric polarization of u -> (u.u) M u, with the bilinear (unconjugated) dot.
  const double m00 = M(0, 0), m01 = M(0, 1), m10 = M(1, 0), m11 = M(1, 1);
  s.T = Trilinear::from_callable(2, [=](const cplx* a, const cplx* b, const cplx* c, cplx* out) {
    const cplx ab = a[0] * b[0] + a[1] * b[1];
    const cplx bc = b[0] * c[0] + b[1] * c[1];
    const cplx ac = a[0] * c[0] + a[1] * c[1];
    out[0] = (ab * (m00 * c[0] + m01 * c[1]) + bc * (m00 * a[0] + m01 * a[1]) + ac * (m00 * b[0] + m01 * b[1])) / 3.0;
    out[1] = (ab * (m10 * c[0] + m11 * c[1]) + bc * (m10 * a[0] + m11 * a[1]) + ac * (m10 * b[0] + m11 * b[1])) / 3.0;
  }, [=](const cplx* u, cplx* out) {
    const cplx uu = u[0] * u[0] + u[1] * u[1];
    out[0] = uu * (m00 * u[0] + m01 * u[1]);
    out[1] = uu * (m10 * u[0] + m11 * u[1]);
  });
  s.validate();
  return s;
}

SystemSpec builtin_maxwell_lorentz_1d() {
  // State (B, E, Q, P) for one transverse polarization:
  //   dt B + dx E = 0
  //   dt E + dx B + Q/eps = 0
  //   dt Q - (E - P)/eps = eps P^3
  //   dt P - Q/eps = 0
  SystemSpec s;
  s.d = 1;
  s.n = 4;
  s.name = "maxwell_lorentz_1d";
  RMat A1 = RMat::Zero(4, 4);
  A1(0, 1) = 1.0;
  A1(1, 0) = 1.0;
  s.A = {A1};
  s.E = RMat::Zero(4, 4);
  s.E(1, 2) = 1.0;
  s.E(2, 1) = -1.0;
  s.E(2, 3) = 1.0;
  s.E(3, 2) = -1.0;
  s.T = Trilinear::from_callable(4, [](const cplx* a, const cplx* b, const cplx* c, cplx* out) {
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = a[3] * b[3] * c[3];
    out[3] = 0.0;
  }, [](const cplx* u, cplx* out) {
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = u[3] * u[3] * u[3];
    out[3] = 0.0;
  });
  s.validate();
  return s;
}

RVec singular_values_ascending(const CMat& L) {
  Eigen::JacobiSVD<CMat> svd(L);
  RVec sv = svd.singularValues();
  std::sort(sv.data(), sv.data() + sv.size());
  return sv;
}

int numerical_kernel_dimension(const CMat& L, double rel_tol) {
  const RVec sv = singular_values_ascending(L);
  const double scale = std::max(sv[sv.size() - 1], 1.0);
  int dim = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] <= rel_tol * scale) ++dim;
  }
  return dim;
}

int phase_pivot(const CVec& v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= vmax * (1.0 - 1e-8)) return i;
  }
  return 0;
}

void fix_phase(Eigen::Ref<CVec> v) {
  const int p = phase_pivot(v);
  const double mag = std::abs(v[p]);
  if (mag == 0.0) return;
  v *= std::conj(v[p]) / mag;
  v[p] = cplx(v[p].real(), 0.0);
}

DispersionData find_dispersion(const SystemSpec& spec, double kappa, BranchSelector selector) {
  if (kappa == 0.0) throw ValidationError("find_dispersion: kappa must be nonzero");
  const CMat H = assemble_L(spec, 0.0, kappa);
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  const RVec& lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());

  DispersionData disp;
  disp.kappa = kappa;
  if (selector.kind == BranchSelector::Kind::index) {
    if (selector.index < 0 || selector.index >= lam.size()) {
      throw ValidationError("find_dispersion: branch index out of range");
    }
    disp.eig_index = selector.index;
  } else {
    int best = -1;
    for (int i = 0; i < lam.size(); ++i) {
      if (lam[i] > 1e-12 * scale && (best < 0 || lam[i] < lam[best])) best = i;
    }
    if (best < 0) throw ValidationError("find_dispersion: A(kappa) - iE has no positive eigenvalue");
    disp.eig_index = best;
  }
  disp.omega = lam[disp.eig_index];

  const CMat L = assemble_L(spec, disp.omega, kappa);
  Eigen::JacobiSVD<CMat> svd(L, Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();  // descending
  const int n = static_cast<int>(sv.size());
  const double smax = std::max(sv[0], 1.0);
  int kdim = 0;
  for (int i = 0; i < n; ++i) {
    if (sv[i] <= 1e-8 * smax) ++kdim;
  }
  disp.second_singular_value = n >= 2 ? sv[n - 2] : 0.0;
  if (kdim != 1) {
    std::ostringstream os;
    os << "find_dispersion: ker L(omega, kappa) has dimension " << kdim << " (omega = " << disp.omega << ")";
    throw KernelDimensionError(os.str(), kdim);
  }
  CVec v = svd.matrixV().col(n - 1);
  v.normalize();
  fix_phase(v);
  disp.kernel_vec = v;
  return disp;
}

double EnvelopeProfile::scalar(double x) const {
  if (kind == Kind::gaussian) {
    const double s = (x - center) / width;
    return amplitude * std::exp(-0.5 * s * s);
  }
  throw ValidationError("profile: sampled profiles have no closed form, use the samples");
}

void EnvelopeProfile::validate(const DispersionData& disp, double torus_length) const {
  if (polarization.size() != disp.kernel_vec.size()) {
    throw ValidationError("profile: polarization has wrong dimension");
  }
  if (std::abs(polarization.norm() - 1.0) > 1e-12) throw ValidationError("profile: polarization must be a unit vector");
  const double overlap = std::abs(disp.kernel_vec.dot(polarization));
  if (std::abs(overlap - 1.0) > 1e-10) {
    throw ValidationError("profile: polarization is not in ker L(omega, kappa)");
  }
  if (kind == Kind::gaussian) {
    if (!(width > 0.0)) throw ValidationError("profile: width must be positive");
    const double peak = std::abs(amplitude);
    const double edge = std::max(std::abs(scalar(-0.5 * torus_length)), std::abs(scalar(0.5 * torus_length)));
    if (peak > 0.0 && edge / peak > 1e-12) {
      throw ValidationError("profile: envelope does not decay to 1e-12 at the torus boundary");
    }
  } else {
    if (samples.empty()) throw ValidationError("profile: no samples");
    double peak = 0.0;
    for (double s : samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.0 && std::abs(samples.front()) / peak > 1e-12) {
      throw ValidationError("profile: sampled envelope does not decay at the torus boundary");
    }
  }
}

}  // namespace envelope
