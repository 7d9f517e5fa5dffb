#include "liectrl/algebra.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace liectrl {

namespace {

void check_dim(const LieAlgebra& a, const Vec& x, const char* what) {
  if (x.size() != a.dim()) {
    throw InputError(std::string(what) + ": expected dimension " +
                     std::to_string(a.dim()) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace

LieAlgebra::LieAlgebra(int dim, const std::vector<BracketEntry>& brackets,
                       std::vector<std::string> labels)
    : dim_(dim), labels_(std::move(labels)) {
  if (dim <= 0) throw InputError("algebra dimension must be positive");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != dim) {
    throw InputError("label count does not match dimension");
  }
  c_.assign(dim, Mat::Zero(dim, dim));
  for (const auto& b : brackets) {
    if (b.i < 0 || b.i >= dim || b.j < 0 || b.j >= dim) {
      throw InputError("bracket index out of range");
    }
    if (b.result.size() != dim) {
      throw InputError("bracket result has wrong dimension");
    }
    if (b.i == b.j) {
      if (b.result.cwiseAbs().maxCoeff() != 0.0) {
        throw InputError("[e_i, e_i] must vanish");
      }
      continue;
    }
    for (int k = 0; k < dim; ++k) {
      c_[k](b.i, b.j) = b.result[k];
      c_[k](b.j, b.i) = -b.result[k];
    }
  }
  ad_.assign(dim, Mat::Zero(dim, dim));
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) {
      for (int j = 0; j < dim; ++j) ad_[i](k, j) = c_[k](i, j);
    }
  }
}

LieAlgebra LieAlgebra::from_structure_tensor(std::vector<Mat> c,
                                             std::vector<std::string> labels) {
  LieAlgebra a;
  a.dim_ = static_cast<int>(c.size());
  if (a.dim_ == 0) throw InputError("empty structure tensor");
  for (const auto& m : c) {
    if (m.rows() != a.dim_ || m.cols() != a.dim_) {
      throw InputError("structure tensor slices must be d x d");
    }
  }
  a.c_ = std::move(c);
  a.labels_ = std::move(labels);
  a.ad_.assign(a.dim_, Mat::Zero(a.dim_, a.dim_));
  for (int i = 0; i < a.dim_; ++i) {
    for (int k = 0; k < a.dim_; ++k) {
      for (int j = 0; j < a.dim_; ++j) a.ad_[i](k, j) = a.c_[k](i, j);
    }
  }
  return a;
}

LieAlgebra LieAlgebra::abelian(int dim) { return LieAlgebra(dim, {}); }

LieAlgebra LieAlgebra::heisenberg() {
  Vec e3 = Vec::Zero(3);
  e3[2] = 1.0;
  return LieAlgebra(3, {{0, 1, e3}}, {"e1", "e2", "e3"});
}

Vec LieAlgebra::bracket(const Vec& x, const Vec& y) const {
  check_dim(*this, x, "bracket lhs");
  check_dim(*this, y, "bracket rhs");
  Vec out(dim_);
  bracket_into(x, y, out);
  return out;
}

void LieAlgebra::bracket_into(const Vec& x, const Vec& y, Vec& out) const {
  for (int k = 0; k < dim_; ++k) out[k] = x.dot(c_[k] * y);
}

Mat LieAlgebra::ad_matrix(const Vec& x) const {
  check_dim(*this, x, "ad argument");
  Mat out(dim_, dim_);
  ad_into(x, out);
  return out;
}

void LieAlgebra::ad_into(const Vec& x, Mat& out) const {
  out.setZero();
  for (int i = 0; i < dim_; ++i) {
    const double xi = x[i];
    if (xi != 0.0) out.noalias() += xi * ad_[i];
  }
}

ValidationReport validate_algebra(const LieAlgebra& a, double eps) {
  const int d = a.dim();
  ValidationReport r;
  for (int k = 0; k < d; ++k) {
    const Mat& ck = a.structure_matrix(k);
    r.antisymmetry_residual =
        std::max(r.antisymmetry_residual, (ck + ck.transpose()).cwiseAbs().maxCoeff());
  }
  Vec ei = Vec::Zero(d), ej = Vec::Zero(d), ek = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    for (int j = i + 1; j < d; ++j) {
      ej.setZero();
      ej[j] = 1.0;
      for (int k = j + 1; k < d; ++k) {
        ek.setZero();
        ek[k] = 1.0;
        Vec cycle = a.bracket(a.bracket(ei, ej), ek) + a.bracket(a.bracket(ej, ek), ei) +
                    a.bracket(a.bracket(ek, ei), ej);
        r.jacobi_residual = std::max(r.jacobi_residual, cycle.cwiseAbs().maxCoeff());
      }
    }
  }
  r.antisymmetry_ok = r.antisymmetry_residual <= eps;
  r.jacobi_ok = r.jacobi_residual <= eps;
  return r;
}

DerivationCheck is_derivation(const LieAlgebra& a, const Mat& D, double eps) {
  const int d = a.dim();
  if (D.rows() != d || D.cols() != d) {
    throw InputError("derivation matrix must be d x d");
  }
  DerivationCheck out;
  Vec ei = Vec::Zero(d), ej = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    for (int j = i + 1; j < d; ++j) {
      ej.setZero();
      ej[j] = 1.0;
      Vec lhs = D * a.bracket(ei, ej);
      Vec rhs = a.bracket(D * ei, ej) + a.bracket(ei, D * ej);
      out.residual = std::max(out.residual, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  out.ok = out.residual <= eps;
  return out;
}

Derivation ad(const LieAlgebra& a, const Vec& x) { return Derivation{a.ad_matrix(x)}; }

std::optional<Vec> is_inner(const LieAlgebra& a, const Derivation& D, double eps) {
  const int d = a.dim();
  if (D.matrix.rows() != d || D.matrix.cols() != d) {
    throw InputError("derivation matrix must be d x d");
  }
  // Columns of M are the vectorized ad(e_i); min-norm least squares picks a witness.
  Mat M(d * d, d);
  for (int i = 0; i < d; ++i) {
    M.col(i) = Eigen::Map<const Vec>(a.ad_generator(i).data(), d * d);
  }
  Vec target = Eigen::Map<const Vec>(D.matrix.data(), d * d);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vec x = svd.solve(target);
  double residual = (M * x - target).cwiseAbs().maxCoeff();
  if (residual > eps) return std::nullopt;
  return x;
}

Subalgebra::Subalgebra(const LieAlgebra& ambient, Mat orthonormal_basis)
    : ambient_(&ambient), basis_(std::move(orthonormal_basis)) {
  if (basis_.rows() != ambient.dim()) {
    throw InputError("subalgebra basis rows must match ambient dimension");
  }
  if (basis_.cols() > 0) {
    Mat gram = basis_.transpose() * basis_;
    double err = (gram - Mat::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw InputError("subalgebra basis is not orthonormal");
  }
}

Subalgebra Subalgebra::span(const LieAlgebra& ambient, const Mat& vectors, double rank_eps) {
  const int d = ambient.dim();
  if (vectors.cols() == 0) return Subalgebra(ambient, Mat::Zero(d, 0));
  if (vectors.rows() != d) throw InputError("span vectors must have ambient dimension");
  Eigen::JacobiSVD<Mat> svd(vectors, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return Subalgebra(ambient, Mat::Zero(d, 0));
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > rank_eps * sv[0]) ++r;
  }
  return Subalgebra(ambient, svd.matrixU().leftCols(r));
}

double Subalgebra::distance(const Vec& v) const {
  check_dim(*ambient_, v, "distance argument");
  if (dim() == 0) return v.cwiseAbs().maxCoeff();
  Vec residual = v - basis_ * (basis_.transpose() * v);
  return residual.cwiseAbs().maxCoeff();
}

bool Subalgebra::contains(const Vec& v, double eps) const { return distance(v) <= eps; }

double Subalgebra::bracket_closure_residual() const {
  double worst = 0.0;
  for (int i = 0; i < dim(); ++i) {
    for (int j = i + 1; j < dim(); ++j) {
      worst = std::max(worst, distance(ambient_->bracket(basis_.col(i), basis_.col(j))));
    }
  }
  return worst;
}

double Subalgebra::invariance_residual(const Mat& M) const {
  double worst = 0.0;
  for (int i = 0; i < dim(); ++i) {
    worst = std::max(worst, distance(M * basis_.col(i)));
  }
  return worst;
}

Mat subspace_intersection(const Mat& A, const Mat& B, double rank_eps) {
  if (A.cols() == 0 || B.cols() == 0) return Mat::Zero(A.rows(), 0);
  // x = A u = B w  <=>  [A | -B] (u; w) = 0; intersection basis is A u.
  Mat stacked(A.rows(), A.cols() + B.cols());
  stacked << A, -B;
  Mat null = nullspace(stacked, rank_eps);
  if (null.cols() == 0) return Mat::Zero(A.rows(), 0);
  Mat inter = A * null.topRows(A.cols());
  Eigen::JacobiSVD<Mat> svd(inter, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > rank_eps * sv[0]) ++r;
  }
  return svd.matrixU().leftCols(r);
}

Mat nullspace(const Mat& M, double rank_eps) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const int n = static_cast<int>(M.cols());
  if (sv.size() == 0 || sv[0] <= 0.0) return Mat::Identity(n, n);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > rank_eps * sv[0]) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

namespace {

/// Grows span(seeds) by pairwise brackets and, when D is given, by D-images,
/// until the dimension is stable. A stable span is bracket-closed and
/// D-invariant, so this is the least such subspace containing the seeds.
Subalgebra closure_iterate(const LieAlgebra& a, const Mat& seeds, const Mat* D,
                           double rank_eps) {
  const int d = a.dim();
  Subalgebra cur = Subalgebra::span(a, seeds, rank_eps);
  for (int iter = 0; iter <= d + 1; ++iter) {
    const Mat& b = cur.basis();
    const int r = cur.dim();
    if (r == d) return cur;
    Mat cand(d, r + (D ? r : 0) + r * (r - 1) / 2);
    cand.leftCols(r) = b;
    int col = r;
    if (D) {
      cand.middleCols(col, r) = (*D) * b;
      col += r;
    }
    for (int i = 0; i < r; ++i) {
      for (int j = i + 1; j < r; ++j) cand.col(col++) = a.bracket(b.col(i), b.col(j));
    }
    Subalgebra next = Subalgebra::span(a, cand, rank_eps);
    if (next.dim() == cur.dim()) return next;
    cur = next;
  }
  throw NumericError("closure iteration failed to stabilize");
}

}  // namespace

Subalgebra subalgebra_closure(const LieAlgebra& a, const Mat& seeds, double rank_eps) {
  return closure_iterate(a, seeds, nullptr, rank_eps);
}

Subalgebra d_invariant_closure(const LieAlgebra& a, const Derivation& D, const Mat& seeds,
                               double rank_eps) {
  if (D.matrix.rows() != a.dim() || D.matrix.cols() != a.dim()) {
    throw InputError("derivation matrix must be d x d");
  }
  return closure_iterate(a, seeds, &D.matrix, rank_eps);
}

namespace {

/// Span of [gens_i, basis_j] over all pairs.
Subalgebra bracket_span(const LieAlgebra& a, const Mat& gens, const Mat& basis,
                        double rank_eps) {
  const int d = a.dim();
  if (gens.cols() == 0 || basis.cols() == 0) return Subalgebra(a, Mat::Zero(d, 0));
  Mat cand(d, gens.cols() * basis.cols());
  int col = 0;
  for (int i = 0; i < gens.cols(); ++i) {
    for (int j = 0; j < basis.cols(); ++j) {
      cand.col(col++) = a.bracket(gens.col(i), basis.col(j));
    }
  }
  return Subalgebra::span(a, cand, rank_eps);
}

}  // namespace

bool is_nilpotent(const Subalgebra& s, double rank_eps) {
  const LieAlgebra& a = s.ambient();
  Mat gens = s.basis();
  Mat cur = gens;
  for (int iter = 0; iter <= s.ambient_dim() + 1; ++iter) {
    if (cur.cols() == 0) return true;
    Mat next = bracket_span(a, gens, cur, rank_eps).basis();
    if (next.cols() >= cur.cols()) return false;
    cur = next;
  }
  return false;
}

bool is_nilpotent(const LieAlgebra& a, double rank_eps) {
  return is_nilpotent(Subalgebra(a, Mat::Identity(a.dim(), a.dim())), rank_eps);
}

bool is_solvable(const Subalgebra& s, double rank_eps) {
  const LieAlgebra& a = s.ambient();
  Mat cur = s.basis();
  for (int iter = 0; iter <= s.ambient_dim() + 1; ++iter) {
    if (cur.cols() == 0) return true;
    Mat next = bracket_span(a, cur, cur, rank_eps).basis();
    if (next.cols() >= cur.cols()) return false;
    cur = next;
  }
  return false;
}

bool is_solvable(const LieAlgebra& a, double rank_eps) {
  return is_solvable(Subalgebra(a, Mat::Identity(a.dim(), a.dim())), rank_eps);
}

std::optional<int> nilpotency_class(const LieAlgebra& a, double rank_eps) {
  Mat gens = Mat::Identity(a.dim(), a.dim());
  Mat cur = gens;
  int k = 1;  // cur spans the k-th lower central term
  for (int iter = 0; iter <= a.dim() + 1; ++iter) {
    Mat next = bracket_span(a, gens, cur, rank_eps).basis();
    if (next.cols() == 0) return k;
    if (next.cols() >= cur.cols()) return std::nullopt;
    cur = next;
    ++k;
  }
  return std::nullopt;
}

}  // namespace liectrl
