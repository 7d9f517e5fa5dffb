#pragma once

#include <complex>
#include <vector>

#include "liectrl/algebra.hpp"

namespace liectrl {

/// One eigenvalue after clustering; conjugate partners appear as separate,
/// adjacent entries with equal multiplicity.
struct EigenvalueCluster {
  std::complex<double> value;
  int multiplicity = 0;
};

/// Clustered spectrum of D with multiplicities summing to the dimension.
/// Real parts within eps_re of zero are normalized to exactly zero.
std::vector<EigenvalueCluster> spectrum(const Mat& D, double eps_re);

/// Orthonormal basis of the real generalized eigenspace of alpha.
/// For a conjugate pair this is the real invariant subspace of {alpha, conj},
/// of dimension twice the cluster multiplicity. alpha must lie within eps_re
/// of the computed spectrum.
Mat generalized_eigenspace(const Mat& D, std::complex<double> alpha, double eps_re,
                           double rank_eps);

/// Sign-of-real-part splitting of the algebra under a derivation.
struct SpectralDecomposition {
  std::vector<EigenvalueCluster> eigenvalues;
  Subalgebra g_plus;        // Re > 0
  Subalgebra g_zero;        // Re = 0
  Subalgebra g_minus;       // Re < 0
  Subalgebra g_plus_zero;   // Re >= 0
  Subalgebra g_minus_zero;  // Re <= 0
  bool hyperbolic = false;  // dim g_zero == 0
};

/// Splits the algebra into generalized eigenspace sums by sign of Re.
/// Verifies the decomposition invariants (dimension count, D-invariance,
/// bracket closure, nilpotency of g_plus and g_minus, intersection
/// identities) and throws InconsistencyError on violation.
SpectralDecomposition decompose(const LieAlgebra& a, const Derivation& D,
                                const Tolerances& tol = {});

struct GradingEntry {
  std::complex<double> alpha;
  std::complex<double> beta;
  bool target_exists = false;  // alpha + beta (or alpha + conj beta) in spectrum
  double residual = 0.0;
};

struct GradingReport {
  std::vector<GradingEntry> entries;
  double worst_residual = 0.0;
  bool pass = false;
};

/// Checks [g_alpha, g_beta] subset g_{alpha+beta} over all eigenvalue pairs,
/// with zero expected when alpha+beta is not an eigenvalue.
GradingReport verify_grading(const LieAlgebra& a, const Derivation& D,
                             const Tolerances& tol = {});

}  // namespace liectrl
