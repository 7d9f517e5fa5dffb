#include "liectrl/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace liectrl {

namespace {

using Cplx = std::complex<double>;

/// Raw eigenvalues with tiny real/imaginary parts snapped to zero and
/// greedy clustering of numerically coincident values.
std::vector<EigenvalueCluster> cluster_eigenvalues(const Mat& D, double eps_re) {
  Eigen::EigenSolver<Mat> solver(D);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolver failed to converge");
  }
  Eigen::VectorXcd raw = solver.eigenvalues();
  double scale = 1.0;
  for (int i = 0; i < raw.size(); ++i) scale = std::max(scale, std::abs(raw[i]));
  // Defective eigenvalues scatter like eps^(1/k); the cluster radius has to
  // dominate that for the Jordan sizes we support while staying far below
  // genuine eigenvalue gaps in the supported inputs.
  const double radius = std::max(eps_re, 1e-6 * scale);

  std::vector<Cplx> vals(raw.data(), raw.data() + raw.size());
  for (auto& v : vals) {
    if (std::abs(v.real()) < eps_re) v.real(0.0);
    if (std::abs(v.imag()) < radius) v.imag(0.0);
    if (v.imag() < 0.0) v = std::conj(v);  // cluster pairs via upper half plane
  }
  std::sort(vals.begin(), vals.end(), [](const Cplx& a, const Cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  std::vector<EigenvalueCluster> clusters;
  for (const Cplx& v : vals) {
    if (!clusters.empty() && std::abs(v - clusters.back().value) <= radius) {
      clusters.back().multiplicity += 1;
      continue;
    }
    clusters.push_back({v, 1});
  }
  return clusters;
}

}  // namespace

std::vector<EigenvalueCluster> spectrum(const Mat& D, double eps_re) {
  if (D.rows() != D.cols() || D.rows() == 0) {
    throw InputError("spectrum requires a nonempty square matrix");
  }
  std::vector<EigenvalueCluster> upper = cluster_eigenvalues(D, eps_re);
  // Upper-half-plane clusters carry conjugate pairs; emit both partners.
  std::vector<EigenvalueCluster> out;
  int total = 0;
  for (const auto& c : upper) {
    if (c.value.imag() == 0.0) {
      out.push_back(c);
      total += c.multiplicity;
    } else {
      if (c.multiplicity % 2 != 0) {
        throw NumericError("conjugate pair with odd total multiplicity");
      }
      EigenvalueCluster half{c.value, c.multiplicity / 2};
      out.push_back(half);
      out.push_back({std::conj(c.value), half.multiplicity});
      total += c.multiplicity;
    }
  }
  if (total != D.rows()) {
    throw NumericError("eigenvalue multiplicities do not sum to the dimension");
  }
  return out;
}

namespace {

/// Kernel of P^d where P is the (real) characteristic factor of alpha:
/// P = D - alpha I for real alpha, P = D^2 - 2 Re(alpha) D + |alpha|^2 I for
/// a conjugate pair. Powers are rescaled each step; the kernel is unchanged.
Mat eigenspace_kernel(const Mat& D, const Cplx& alpha, double rank_eps) {
  const int d = static_cast<int>(D.rows());
  Mat P;
  if (alpha.imag() == 0.0) {
    P = D - alpha.real() * Mat::Identity(d, d);
  } else {
    P = D * D - 2.0 * alpha.real() * D + std::norm(alpha) * Mat::Identity(d, d);
  }
  Mat power = Mat::Identity(d, d);
  for (int k = 0; k < d; ++k) {
    power = P * power;
    double top = power.cwiseAbs().maxCoeff();
    if (top > 0.0) power /= top;
  }
  return nullspace(power, rank_eps);
}

Subalgebra checked_subalgebra(const LieAlgebra& a, const Mat& vectors, const char* name,
                              const Tolerances& tol) {
  Subalgebra s = Subalgebra::span(a, vectors, tol.rank);
  double closure = s.bracket_closure_residual();
  if (closure > tol.alg) {
    throw InconsistencyError(std::string(name) + " is not bracket closed, residual " +
                             std::to_string(closure));
  }
  return s;
}

}  // namespace

Mat generalized_eigenspace(const Mat& D, std::complex<double> alpha, double eps_re,
                           double rank_eps) {
  if (D.rows() != D.cols() || D.rows() == 0) {
    throw InputError("generalized_eigenspace requires a square matrix");
  }
  std::vector<EigenvalueCluster> spec = spectrum(D, eps_re);
  const EigenvalueCluster* hit = nullptr;
  for (const auto& c : spec) {
    if (std::abs(c.value - alpha) <= eps_re ||
        std::abs(std::conj(c.value) - alpha) <= eps_re) {
      hit = &c;
      break;
    }
  }
  if (!hit) throw DomainError("alpha is not within eps_re of the spectrum");
  Mat basis = eigenspace_kernel(D, hit->value, rank_eps);
  const int expected =
      hit->value.imag() == 0.0 ? hit->multiplicity : 2 * hit->multiplicity;
  if (basis.cols() != expected) {
    throw InconsistencyError("generalized eigenspace dimension " +
                             std::to_string(basis.cols()) + " != algebraic multiplicity " +
                             std::to_string(expected));
  }
  return basis;
}

SpectralDecomposition decompose(const LieAlgebra& a, const Derivation& D,
                                const Tolerances& tol) {
  const int d = a.dim();
  DerivationCheck leibniz = is_derivation(a, D.matrix, tol.alg);
  if (!leibniz.ok) {
    throw InputError("decompose requires a derivation; Leibniz residual " +
                     std::to_string(leibniz.residual));
  }

  SpectralDecomposition out{std::vector<EigenvalueCluster>{},
                            Subalgebra(a, Mat::Zero(d, 0)),
                            Subalgebra(a, Mat::Zero(d, 0)),
                            Subalgebra(a, Mat::Zero(d, 0)),
                            Subalgebra(a, Mat::Zero(d, 0)),
                            Subalgebra(a, Mat::Zero(d, 0)),
                            false};
  out.eigenvalues = spectrum(D.matrix, tol.re);

  Mat plus(d, 0), zero(d, 0), minus(d, 0);
  auto append = [](Mat& dst, const Mat& add) {
    Mat merged(dst.rows(), dst.cols() + add.cols());
    merged << dst, add;
    dst = merged;
  };
  int expected_plus = 0, expected_zero = 0, expected_minus = 0;
  for (const auto& c : out.eigenvalues) {
    if (c.value.imag() < 0.0) continue;  // conjugate partner shares the real subspace
    Mat basis = eigenspace_kernel(D.matrix, c.value, tol.rank);
    const int mult = c.value.imag() == 0.0 ? c.multiplicity : 2 * c.multiplicity;
    if (basis.cols() != mult) {
      throw InconsistencyError("eigenspace dimension mismatch for clustered eigenvalue");
    }
    if (c.value.real() > 0.0) {
      append(plus, basis);
      expected_plus += mult;
    } else if (c.value.real() < 0.0) {
      append(minus, basis);
      expected_minus += mult;
    } else {
      append(zero, basis);
      expected_zero += mult;
    }
  }

  out.g_plus = checked_subalgebra(a, plus, "g_plus", tol);
  out.g_zero = checked_subalgebra(a, zero, "g_zero", tol);
  out.g_minus = checked_subalgebra(a, minus, "g_minus", tol);
  Mat pz(d, plus.cols() + zero.cols());
  pz << plus, zero;
  Mat mz(d, minus.cols() + zero.cols());
  mz << minus, zero;
  out.g_plus_zero = checked_subalgebra(a, pz, "g_plus_zero", tol);
  out.g_minus_zero = checked_subalgebra(a, mz, "g_minus_zero", tol);
  out.hyperbolic = out.g_zero.dim() == 0;

  if (out.g_plus.dim() != expected_plus || out.g_zero.dim() != expected_zero ||
      out.g_minus.dim() != expected_minus ||
      out.g_plus.dim() + out.g_zero.dim() + out.g_minus.dim() != d ||
      out.g_plus_zero.dim() != expected_plus + expected_zero ||
      out.g_minus_zero.dim() != expected_minus + expected_zero) {
    throw InconsistencyError("spectral subspace dimensions do not sum to the dimension");
  }
  for (const Subalgebra* s :
       {&out.g_plus, &out.g_zero, &out.g_minus, &out.g_plus_zero, &out.g_minus_zero}) {
    double inv = s->invariance_residual(D.matrix);
    if (inv > 1e-7) {
      throw InconsistencyError("spectral subspace is not D-invariant, residual " +
                               std::to_string(inv));
    }
  }
  if (!is_nilpotent(out.g_plus, tol.rank) || !is_nilpotent(out.g_minus, tol.rank)) {
    throw InconsistencyError("g_plus or g_minus failed the nilpotency check");
  }
  auto inter_dim = [&](const Subalgebra& x, const Subalgebra& y) {
    return static_cast<int>(subspace_intersection(x.basis(), y.basis(), tol.rank).cols());
  };
  if (inter_dim(out.g_plus, out.g_minus) != 0 ||
      inter_dim(out.g_plus_zero, out.g_minus) != 0 ||
      inter_dim(out.g_minus_zero, out.g_plus) != 0) {
    throw InconsistencyError("unexpected overlap between opposite spectral subspaces");
  }
  Mat mid = subspace_intersection(out.g_plus_zero.basis(), out.g_minus_zero.basis(), tol.rank);
  bool mid_ok = static_cast<int>(mid.cols()) == out.g_zero.dim();
  for (int i = 0; mid_ok && i < out.g_zero.dim(); ++i) {
    Vec b = out.g_zero.basis().col(i);
    Vec res = b - mid * (mid.transpose() * b);
    mid_ok = res.cwiseAbs().maxCoeff() <= 1e-7;
  }
  if (!mid_ok) {
    throw InconsistencyError("g_plus_zero ∩ g_minus_zero does not equal g_zero");
  }
  return out;
}

GradingReport verify_grading(const LieAlgebra& a, const Derivation& D,
                             const Tolerances& tol) {
  const int d = a.dim();
  DerivationCheck leibniz = is_derivation(a, D.matrix, tol.alg);
  if (!leibniz.ok) {
    throw InputError("verify_grading requires a derivation; Leibniz residual " +
                     std::to_string(leibniz.residual));
  }
  std::vector<EigenvalueCluster> spec = spectrum(D.matrix, tol.re);
  // One real representative subspace per cluster; conjugate partners share it.
  struct Piece {
    Cplx alpha;
    Mat basis;
  };
  std::vector<Piece> pieces;
  for (const auto& c : spec) {
    if (c.value.imag() < 0.0) continue;
    pieces.push_back({c.value, eigenspace_kernel(D.matrix, c.value, tol.rank)});
  }

  GradingReport report;
  for (const auto& pa : pieces) {
    for (const auto& pb : pieces) {
      // Real span of the sums: candidates alpha+beta and alpha+conj(beta).
      Mat target(d, 0);
      bool exists = false;
      for (const auto& pt : pieces) {
        const Cplx s1 = pa.alpha + pb.alpha;
        const Cplx s2 = pa.alpha + std::conj(pb.alpha);
        if (std::abs(pt.alpha - s1) <= tol.re || std::abs(std::conj(pt.alpha) - s1) <= tol.re ||
            std::abs(pt.alpha - s2) <= tol.re || std::abs(std::conj(pt.alpha) - s2) <= tol.re) {
          Mat merged(d, target.cols() + pt.basis.cols());
          merged << target, pt.basis;
          target = merged;
          exists = true;
        }
      }
      Subalgebra span = Subalgebra::span(a, target, tol.rank);
      double worst = 0.0;
      for (int i = 0; i < pa.basis.cols(); ++i) {
        for (int j = 0; j < pb.basis.cols(); ++j) {
          Vec br = a.bracket(pa.basis.col(i), pb.basis.col(j));
          worst = std::max(worst, exists ? span.distance(br) : br.cwiseAbs().maxCoeff());
        }
      }
      report.entries.push_back({pa.alpha, pb.alpha, exists, worst});
      report.worst_residual = std::max(report.worst_residual, worst);
    }
  }
  report.pass = report.worst_residual <= tol.alg;
  return report;
}

}  // namespace liectrl
