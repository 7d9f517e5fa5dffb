#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "liectrl/errors.hpp"
#include "liectrl/tolerances.hpp"

namespace liectrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One basis bracket [e_i, e_j] = result, indices 0-based.
struct BracketEntry {
  int i = 0;
  int j = 0;
  Vec result;
};

/// Finite-dimensional real Lie algebra given by structure constants.
///
/// Storage is one d x d matrix per output coordinate, so that
/// bracket(x, y)_k = x^T C_k y. Antisymmetry is enforced on construction;
/// the Jacobi identity is checked separately by validate_algebra().
class LieAlgebra {
 public:
  LieAlgebra(int dim, const std::vector<BracketEntry>& brackets,
             std::vector<std::string> labels = {});

  /// Builds from a raw structure tensor c[k](i,j) without symmetrization.
  /// Used to feed deliberately broken tensors to validate_algebra().
  static LieAlgebra from_structure_tensor(std::vector<Mat> c,
                                          std::vector<std::string> labels = {});

  static LieAlgebra abelian(int dim);
  /// 3-dimensional Heisenberg algebra, [e1, e2] = e3.
  static LieAlgebra heisenberg();

  int dim() const { return dim_; }
  /// Coefficient of e_k in [e_i, e_j].
  double structure(int k, int i, int j) const { return c_[k](i, j); }
  const Mat& structure_matrix(int k) const { return c_[k]; }
  /// Matrix of ad(e_i).
  const Mat& ad_generator(int i) const { return ad_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  Vec bracket(const Vec& x, const Vec& y) const;
  /// Allocation-free bracket for hot loops. out must be distinct from x, y.
  void bracket_into(const Vec& x, const Vec& y, Vec& out) const;
  Mat ad_matrix(const Vec& x) const;
  /// Allocation-free ad(x) accumulation. out must be d x d.
  void ad_into(const Vec& x, Mat& out) const;

 private:
  LieAlgebra() = default;

  int dim_ = 0;
  std::vector<Mat> c_;   // c_[k](i,j) = coefficient of e_k in [e_i,e_j]
  std::vector<Mat> ad_;  // ad_[i] = matrix of ad(e_i)
  std::vector<std::string> labels_;
};

struct ValidationReport {
  double antisymmetry_residual = 0.0;
  double jacobi_residual = 0.0;
  bool antisymmetry_ok = false;
  bool jacobi_ok = false;
  bool ok() const { return antisymmetry_ok && jacobi_ok; }
};

/// Checks antisymmetry and the Jacobi identity against eps.
ValidationReport validate_algebra(const LieAlgebra& a, double eps);

/// Linear map on the algebra; Leibniz compliance is checked by is_derivation().
struct Derivation {
  Mat matrix;
};

struct DerivationCheck {
  double residual = 0.0;
  bool ok = false;
};

/// Max Leibniz residual of D over basis pairs: D[x,y] - [Dx,y] - [x,Dy].
DerivationCheck is_derivation(const LieAlgebra& a, const Mat& D, double eps);

/// Inner derivation ad(x).
Derivation ad(const LieAlgebra& a, const Vec& x);

/// Least-squares witness x with ad(x) = D, if one exists within eps.
std::optional<Vec> is_inner(const LieAlgebra& a, const Derivation& D, double eps);

/// Linear subspace of an algebra, kept as an orthonormal column basis.
/// Bracket closure is a property of how it was built; callers that need it
/// verified use bracket_closure_residual().
class Subalgebra {
 public:
  Subalgebra(const LieAlgebra& ambient, Mat orthonormal_basis);

  /// Orthonormalized span of arbitrary vectors (columns).
  static Subalgebra span(const LieAlgebra& ambient, const Mat& vectors, double rank_eps);

  const LieAlgebra& ambient() const { return *ambient_; }
  int ambient_dim() const { return ambient_->dim(); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  /// d x r matrix with orthonormal columns.
  const Mat& basis() const { return basis_; }

  /// Sup-norm distance from v to the span.
  double distance(const Vec& v) const;
  bool contains(const Vec& v, double eps) const;
  /// Max distance of [b_i, b_j] from the span over basis pairs.
  double bracket_closure_residual() const;
  /// Max distance of M*b_i from the span (invariance of the span under M).
  double invariance_residual(const Mat& M) const;

 private:
  const LieAlgebra* ambient_;
  Mat basis_;
};

/// Orthonormal basis of span(A) ∩ span(B); A, B have orthonormal columns.
Mat subspace_intersection(const Mat& A, const Mat& B, double rank_eps);

/// Orthonormal basis for the nullspace of M (relative threshold rank_eps).
Mat nullspace(const Mat& M, double rank_eps);

/// Smallest bracket-closed subspace containing the seeds.
Subalgebra subalgebra_closure(const LieAlgebra& a, const Mat& seeds, double rank_eps);

/// Smallest bracket-closed D-invariant subspace containing the seeds.
Subalgebra d_invariant_closure(const LieAlgebra& a, const Derivation& D,
                               const Mat& seeds, double rank_eps);

bool is_nilpotent(const Subalgebra& s, double rank_eps);
bool is_nilpotent(const LieAlgebra& a, double rank_eps);
bool is_solvable(const Subalgebra& s, double rank_eps);
bool is_solvable(const LieAlgebra& a, double rank_eps);

/// Smallest c with the (c+1)-st lower central term zero; nullopt if not nilpotent.
std::optional<int> nilpotency_class(const LieAlgebra& a, double rank_eps);

}  // namespace liectrl
