#pragma once

#include <vector>

#include "liectrl/analysis.hpp"

namespace liectrl {

/// Group element in exponential coordinates of the first kind (log chart).
/// Valid globally for simply connected nilpotent groups of class <= 4, the
/// class this module supports.
using LogPoint = Vec;

/// Group product in the log chart, exact for nilpotency class <= 4:
/// z = x + y + [x,y]/2 + ([x,[x,y]] + [y,[y,x]])/12 - [y,[x,[x,y]]]/24.
LogPoint bch_product(const LieAlgebra& a, const LogPoint& x, const LogPoint& y);

/// Requires nilpotency class <= 4; throws UnsupportedError otherwise.
void require_bch_class(const LieAlgebra& a, double rank_eps);

/// Allocation-free BCH products for hot loops; validates the class once.
class BchEvaluator {
 public:
  explicit BchEvaluator(const LieAlgebra& a, double rank_eps);

  void product_into(const Vec& x, const Vec& y, Vec& out);

 private:
  const LieAlgebra* algebra_;
  Vec xy_, xxy_, yx_, yyx_, yxxy_;
};

/// e^{tD} as a matrix.
Mat flow_matrix(const Derivation& D, double t);

/// Drift flow applied to a log point: exp coordinates of the automorphism.
LogPoint flow(const Derivation& D, double t, const LogPoint& x);

/// Reusable evaluator for the controlled field in the log chart:
///   xdot = D x + sum_j u_j T(x) X^j,  T(x) = I - ad_x/2 + ad_x^2/12,
/// the inverse right-trivialized differential of exp, exact for class <= 4.
/// Holds scratch buffers; one instance per thread.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(const LinearSystemSpec& s);

  const LinearSystemSpec& system() const { return *spec_; }
  /// direction -1 evaluates the time-reversed field.
  void eval(const Vec& x, const Vec& u, double direction, Vec& out);
  /// One RK4 step of size h in place.
  void rk4_step(Vec& x, const Vec& u, double h, double direction);
  /// Integrates a constant control over `duration` with fixed step dt.
  void advance(Vec& x, const Vec& u, double duration, double dt, double direction);

 private:
  const LinearSystemSpec* spec_;
  Mat adx_;
  Vec w1_, w2_, k1_, k2_, k3_, k4_, xt_;
};

struct ControlSegment {
  double duration = 0.0;
  Vec value;
};

using ControlSchedule = std::vector<ControlSegment>;

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> x;
};

struct IntegrateOptions {
  double dt = 1e-3;
  /// Sup-norm radius beyond which integration aborts with DivergenceError.
  double safety_radius = 1e6;
};

/// Fixed-step RK4 integration of a piecewise-constant control schedule.
/// Segment durations must be integer multiples of dt.
Trajectory integrate(const LinearSystemSpec& s, const LogPoint& x0,
                     const ControlSchedule& schedule, const IntegrateOptions& opts = {});

/// Residual of the translation identity: the solution from g must equal the
/// product of the solution from the identity with the drift flow of g.
double solution_identity_check(const LinearSystemSpec& s, const LogPoint& g,
                               const ControlSchedule& schedule,
                               const IntegrateOptions& opts = {});

/// Finite set of control levels used by the grid explorers: the vertices of
/// the range, 0, and edge midpoints (pairwise midpoints for polytopes).
struct ControlSample {
  std::vector<Vec> values;
  double dwell = 0.1;

  static ControlSample standard(const ControlRange& omega, double dwell);
};

}  // namespace liectrl
