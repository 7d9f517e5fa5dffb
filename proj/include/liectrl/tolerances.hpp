#pragma once

namespace liectrl {

/// Numerical thresholds shared across algebraic and spectral routines.
struct Tolerances {
  /// Max residual for algebraic identities (Jacobi, Leibniz, closure).
  double alg = 1e-9;
  /// Relative singular-value cutoff for rank and span decisions.
  double rank = 1e-8;
  /// |Re(alpha)| below this is normalized to zero when grouping eigenvalues.
  double re = 1e-7;
};

}  // namespace liectrl
