#include "envelope/eigen_toolkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace envelope {
namespace {

constexpr double kMatchWarn = 0.7;

struct RawDecomp {
  RVec lambda;
  CMat psi;
};

// Column permutation of `next` maximizing the summed overlap with `prev`.
std::vector<int> best_matching(const CMat& prev, const CMat& next, double& worst) {
  const int n = static_cast<int>(prev.cols());
  const CMat overlap = (prev.adjoint() * next).cwiseAbs().cast<cplx>();
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n <= 6) {
    double best_sum = -1.0;
    do {
      double sum = 0.0;
      for (int c = 0; c < n; ++c) sum += overlap(c, perm[c]).real();
      if (sum > best_sum + 1e-14) {
        best_sum = sum;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<bool> used(n, false);
    for (int c = 0; c < n; ++c) {
      int arg = -1;
      for (int r = 0; r < n; ++r) {
        if (!used[r] && (arg < 0 || overlap(c, r).real() > overlap(c, arg).real())) arg = r;
      }
      used[arg] = true;
      best[c] = arg;
    }
  }
  worst = 1.0;
  for (int c = 0; c < n; ++c) worst = std::min(worst, overlap(c, best[c]).real());
  return best;
}

}  // namespace

CMat ModeDecomp::reconstruct(int i) const {
  const CMat P = eigenvectors(i);
  return P * eigenvalues(i).cast<cplx>().asDiagonal() * P.adjoint();
}

CMat assemble_Lj(const SystemSpec& spec, const DispersionData& disp, int j, double theta) {
  return assemble_L(spec, j * disp.omega, j * disp.kappa + theta);
}

ModeDecomp decompose_grid(const SystemSpec& spec, const DispersionData& disp, int j, const std::vector<double>& thetas) {
  if (j != 1 && j != 3 && j != 5) throw ValidationError("decompose_grid: j must be 1, 3 or 5");
  if (thetas.empty()) throw ValidationError("decompose_grid: empty grid");
  if (!std::is_sorted(thetas.begin(), thetas.end())) throw ValidationError("decompose_grid: thetas must be ascending");
  const int n = spec.n;
  const int modes = static_cast<int>(thetas.size());

  std::vector<RawDecomp> raw(modes);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < modes; ++i) {
    Eigen::SelfAdjointEigenSolver<CMat> es(assemble_Lj(spec, disp, j, thetas[i]));
    raw[i] = {es.eigenvalues(), es.eigenvectors()};
  }

  int anchor = 0;
  for (int i = 1; i < modes; ++i) {
    if (std::abs(thetas[i]) < std::abs(thetas[anchor])) anchor = i;
  }

  {
    RawDecomp& a = raw[anchor];
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (j == 1) {
      int k0 = 0;
      for (int l = 1; l < n; ++l) {
        if (std::abs(a.lambda[l]) < std::abs(a.lambda[k0])) k0 = l;
      }
      order.erase(order.begin() + k0);
      order.insert(order.begin(), k0);
    }
    RawDecomp sorted{RVec(n), CMat(n, n)};
    for (int l = 0; l < n; ++l) {
      sorted.lambda[l] = a.lambda[order[l]];
      sorted.psi.col(l) = a.psi.col(order[l]);
      fix_phase(sorted.psi.col(l));
    }
    a = std::move(sorted);
  }

  ModeDecomp out;
  out.j = j;
  out.n = n;
  out.thetas = thetas;

  auto continue_from = [&](int from, int to) {
    double worst = 1.0;
    const std::vector<int> perm = best_matching(raw[from].psi, raw[to].psi, worst);
    RawDecomp next{RVec(n), CMat(n, n)};
    for (int l = 0; l < n; ++l) {
      next.lambda[l] = raw[to].lambda[perm[l]];
      CVec v = raw[to].psi.col(perm[l]);
      const cplx ov = raw[from].psi.col(l).dot(v);
      if (std::abs(ov) > 0.0) v *= std::conj(ov) / std::abs(ov);
      next.psi.col(l) = v;
    }
    raw[to] = std::move(next);
    if (worst < out.min_match_score) out.min_match_score = worst;
    if (worst < kMatchWarn) {
      std::ostringstream os;
      os << "possible eigenvalue crossing for j = " << j << " near theta = " << thetas[to]
         << " (continuation overlap " << worst << ")";
      out.warnings.push_back(os.str());
    }
  };
  for (int i = anchor + 1; i < modes; ++i) continue_from(i - 1, i);
  for (int i = anchor - 1; i >= 0; --i) continue_from(i + 1, i);

  out.lambda.resize(static_cast<std::size_t>(modes) * n);
  out.psi.resize(static_cast<std::size_t>(modes) * n * n);
  for (int i = 0; i < modes; ++i) {
    std::copy(raw[i].lambda.data(), raw[i].lambda.data() + n, out.lambda.begin() + static_cast<std::ptrdiff_t>(i) * n);
    std::copy(raw[i].psi.data(), raw[i].psi.data() + n * n, out.psi.begin() + static_cast<std::ptrdiff_t>(i) * n * n);
  }
  for (int i = 0; i + 1 < modes; ++i) {
    const double dt = thetas[i + 1] - thetas[i];
    if (dt <= 0.0) continue;
    const double dl = (out.eigenvalues(i + 1) - out.eigenvalues(i)).cwiseAbs().maxCoeff();
    const double dp = (out.eigenvectors(i + 1) - out.eigenvectors(i)).cwiseAbs().maxCoeff();
    out.lipschitz_estimate = std::max(out.lipschitz_estimate, dl / dt);
    out.psi_continuity = std::max(out.psi_continuity, dp / dt);
  }
  return out;
}

ModeDecomp negative_harmonic(const ModeDecomp& d) {
  const int modes = d.size();
  for (int i = 0; i < modes; ++i) {
    const double a = d.thetas[i], b = d.thetas[modes - 1 - i];
    if (std::abs(a + b) > 1e-12 * std::max(1.0, std::abs(a))) {
      throw ValidationError("negative_harmonic: grid is not symmetric about 0");
    }
  }
  ModeDecomp out = d;
  out.j = -d.j;
  const int n = d.n;
  for (int i = 0; i < modes; ++i) {
    const int mirror = modes - 1 - i;
    out.thetas[i] = -d.thetas[mirror];
    for (int l = 0; l < n; ++l) out.lambda[static_cast<std::size_t>(i) * n + l] = -d.lambda[static_cast<std::size_t>(mirror) * n + l];
    for (int q = 0; q < n * n; ++q) {
      out.psi[static_cast<std::size_t>(i) * n * n + q] = -std::conj(d.psi[static_cast<std::size_t>(mirror) * n * n + q]);
    }
  }
  return out;
}

AssumptionReport check_assumptions(const SystemSpec& spec, const DispersionData& disp) {
  AssumptionReport r;
  const CMat L1 = assemble_L(spec, disp.omega, disp.kappa);
  const RVec sv1 = singular_values_ascending(L1);
  r.kernel_dim = numerical_kernel_dimension(L1);
  r.kernel_second_singular = sv1.size() > 1 ? sv1[1] : 0.0;
  r.kernel_ok = r.kernel_dim == 1;

  auto invert_check = [&](int j, double& smin, double& det, bool& ok) {
    const CMat L = assemble_L(spec, j * disp.omega, j * disp.kappa);
    const RVec sv = singular_values_ascending(L);
    smin = sv[0];
    det = L.determinant().real();
    ok = sv[0] > 1e-8 * std::max(1.0, sv[sv.size() - 1]);
  };
  invert_check(3, r.sigma_min_L3, r.det_L3, r.invertible_L3);
  invert_check(5, r.sigma_min_L5, r.det_L5, r.invertible_L5);

  // Sorted eigenvalues of L(0, beta) on a beta grid; Weyl gives ||A_1||_2 as the exact bound.
  const double span = 20.0 * std::max(1.0, std::abs(disp.kappa));
  const int samples = 4001;
  RVec prev;
  double prev_beta = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double beta = -span + 2.0 * span * s / (samples - 1);
    Eigen::SelfAdjointEigenSolver<CMat> es(assemble_L(spec, 0.0, beta), Eigen::EigenvaluesOnly);
    const RVec lam = es.eigenvalues();
    if (s > 0) {
      const double ratio = (lam - prev).cwiseAbs().maxCoeff() / (beta - prev_beta);
      r.lipschitz_estimate = std::max(r.lipschitz_estimate, ratio);
    }
    prev = lam;
    prev_beta = beta;
  }
  Eigen::SelfAdjointEigenSolver<RMat> a1(spec.A[0], Eigen::EigenvaluesOnly);
  r.lipschitz_weyl_bound = a1.eigenvalues().cwiseAbs().maxCoeff();
  r.lipschitz_ok = std::isfinite(r.lipschitz_estimate) && r.lipschitz_estimate <= r.lipschitz_weyl_bound * (1.0 + 1e-9) + 1e-12;
  return r;
}

NonResonanceReport check_nonresonance(const RVec& lambda3, const RVec& lambda5) {
  NonResonanceReport r;
  r.lambda3 = lambda3;
  r.lambda5 = lambda5;
  r.gap = std::numeric_limits<double>::infinity();
  for (int l = 0; l < lambda3.size(); ++l) {
    for (int m = 0; m < lambda5.size(); ++m) r.gap = std::min(r.gap, std::abs(lambda3[l] - lambda5[m]));
  }
  const double scale = std::max({1.0, lambda3.cwiseAbs().maxCoeff(), lambda5.cwiseAbs().maxCoeff()});
  r.tolerance = 1e-8 * scale;
  r.passed = r.gap > r.tolerance;
  return r;
}

NonResonanceReport check_nonresonance(const SystemSpec& spec, const DispersionData& disp) {
  const std::vector<double> zero{0.0};
  const ModeDecomp d3 = decompose_grid(spec, disp, 3, zero);
  const ModeDecomp d5 = decompose_grid(spec, disp, 5, zero);
  return check_nonresonance(RVec(d3.eigenvalues(0)), RVec(d5.eigenvalues(0)));
}

}  // namespace envelope
