#include "liectrl/simulation.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace liectrl {

void require_bch_class(const LieAlgebra& a, double rank_eps) {
  std::optional<int> cls = nilpotency_class(a, rank_eps);
  if (!cls) throw UnsupportedError("algebra is not nilpotent");
  if (*cls > 4) {
    throw UnsupportedError("nilpotency class " + std::to_string(*cls) +
                           " exceeds the supported truncation (class 4)");
  }
}

LogPoint bch_product(const LieAlgebra& a, const LogPoint& x, const LogPoint& y) {
  BchEvaluator bch(a, Tolerances{}.rank);
  Vec out(a.dim());
  bch.product_into(x, y, out);
  return out;
}

BchEvaluator::BchEvaluator(const LieAlgebra& a, double rank_eps) : algebra_(&a) {
  require_bch_class(a, rank_eps);
  const int d = a.dim();
  xy_.resize(d);
  xxy_.resize(d);
  yx_.resize(d);
  yyx_.resize(d);
  yxxy_.resize(d);
}

void BchEvaluator::product_into(const Vec& x, const Vec& y, Vec& out) {
  const LieAlgebra& a = *algebra_;
  a.bracket_into(x, y, xy_);      // [x,y]
  a.bracket_into(x, xy_, xxy_);   // [x,[x,y]]
  yx_ = -xy_;
  a.bracket_into(y, yx_, yyx_);   // [y,[y,x]]
  a.bracket_into(y, xxy_, yxxy_); // [y,[x,[x,y]]]
  out = x + y + 0.5 * xy_ + (xxy_ + yyx_) / 12.0 - yxxy_ / 24.0;
}

Mat flow_matrix(const Derivation& D, double t) {
  if (D.matrix.rows() != D.matrix.cols()) throw InputError("flow needs a square matrix");
  return (t * D.matrix).exp();
}

LogPoint flow(const Derivation& D, double t, const LogPoint& x) {
  if (x.size() != D.matrix.rows()) throw InputError("flow point has wrong dimension");
  return flow_matrix(D, t) * x;
}

FieldEvaluator::FieldEvaluator(const LinearSystemSpec& s) : spec_(&s) {
  require_bch_class(s.algebra, s.tol.rank);
  const int d = s.algebra.dim();
  adx_.resize(d, d);
  w1_.resize(d);
  w2_.resize(d);
  k1_.resize(d);
  k2_.resize(d);
  k3_.resize(d);
  k4_.resize(d);
  xt_.resize(d);
}

void FieldEvaluator::eval(const Vec& x, const Vec& u, double direction, Vec& out) {
  const LinearSystemSpec& s = *spec_;
  s.algebra.ad_into(x, adx_);
  out.noalias() = s.drift.matrix * x;
  for (size_t j = 0; j < s.controls.size(); ++j) {
    const double uj = u[static_cast<int>(j)];
    if (uj == 0.0) continue;
    const Vec& Xj = s.controls[j];
    w1_.noalias() = adx_ * Xj;
    w2_.noalias() = adx_ * w1_;
    out.noalias() += uj * (Xj - 0.5 * w1_ + w2_ / 12.0);
  }
  if (direction < 0.0) out = -out;
}

void FieldEvaluator::rk4_step(Vec& x, const Vec& u, double h, double direction) {
  eval(x, u, direction, k1_);
  xt_ = x + 0.5 * h * k1_;
  eval(xt_, u, direction, k2_);
  xt_ = x + 0.5 * h * k2_;
  eval(xt_, u, direction, k3_);
  xt_ = x + h * k3_;
  eval(xt_, u, direction, k4_);
  x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

void FieldEvaluator::advance(Vec& x, const Vec& u, double duration, double dt,
                             double direction) {
  const long long steps = std::llround(duration / dt);
  for (long long i = 0; i < steps; ++i) rk4_step(x, u, dt, direction);
}

namespace {

long long checked_steps(double duration, double dt) {
  if (dt <= 0.0) throw InputError("integration step must be positive");
  if (duration < 0.0) throw InputError("segment duration must be nonnegative");
  const long long steps = std::llround(duration / dt);
  if (std::abs(steps * dt - duration) > 1e-9 * std::max(1.0, duration)) {
    throw InputError("segment duration must be an integer multiple of dt");
  }
  return steps;
}

}  // namespace

Trajectory integrate(const LinearSystemSpec& s, const LogPoint& x0,
                     const ControlSchedule& schedule, const IntegrateOptions& opts) {
  if (x0.size() != s.algebra.dim()) throw InputError("initial point has wrong dimension");
  for (const auto& seg : schedule) {
    if (seg.value.size() != static_cast<int>(s.controls.size())) {
      throw InputError("control value has wrong dimension");
    }
  }
  FieldEvaluator field(s);
  Trajectory out;
  double t = 0.0;
  Vec x = x0;
  out.t.push_back(t);
  out.x.push_back(x);
  for (const auto& seg : schedule) {
    const long long steps = checked_steps(seg.duration, opts.dt);
    for (long long i = 0; i < steps; ++i) {
      field.rk4_step(x, seg.value, opts.dt, 1.0);
      t += opts.dt;
      if (x.cwiseAbs().maxCoeff() > opts.safety_radius) {
        throw DivergenceError("trajectory left the safety region at t = " +
                              std::to_string(t));
      }
      out.t.push_back(t);
      out.x.push_back(x);
    }
  }
  return out;
}

double solution_identity_check(const LinearSystemSpec& s, const LogPoint& g,
                               const ControlSchedule& schedule,
                               const IntegrateOptions& opts) {
  double total = 0.0;
  for (const auto& seg : schedule) total += seg.duration;
  Trajectory from_g = integrate(s, g, schedule, opts);
  Trajectory from_e = integrate(s, Vec::Zero(s.algebra.dim()), schedule, opts);
  LogPoint expected = bch_product(s.algebra, from_e.x.back(), flow(s.drift, total, g));
  return (from_g.x.back() - expected).cwiseAbs().maxCoeff();
}

ControlSample ControlSample::standard(const ControlRange& omega, double dwell) {
  if (dwell <= 0.0) throw InputError("dwell must be positive");
  ControlSample out;
  out.dwell = dwell;
  const int m = omega.dim();
  std::vector<Vec> values;
  values.push_back(Vec::Zero(m));
  if (omega.is_box()) {
    const Vec& rad = omega.radii();
    for (int mask = 0; mask < (1 << m); ++mask) {
      Vec v(m);
      for (int i = 0; i < m; ++i) v[i] = (mask >> i & 1) ? rad[i] : -rad[i];
      values.push_back(v);
    }
    // Edge midpoints: one coordinate zeroed, the rest at a vertex.
    for (int axis = 0; axis < m; ++axis) {
      for (int mask = 0; mask < (1 << m); ++mask) {
        if (mask >> axis & 1) continue;
        Vec v(m);
        for (int i = 0; i < m; ++i) v[i] = (mask >> i & 1) ? rad[i] : -rad[i];
        v[axis] = 0.0;
        values.push_back(v);
      }
    }
  } else {
    const auto& verts = omega.vertices();
    for (const Vec& v : verts) values.push_back(v);
    for (size_t i = 0; i < verts.size(); ++i) {
      for (size_t j = i + 1; j < verts.size(); ++j) {
        values.push_back(0.5 * (verts[i] + verts[j]));
      }
    }
  }
  for (const Vec& v : values) {
    bool seen = false;
    for (const Vec& w : out.values) {
      if ((v - w).cwiseAbs().maxCoeff() < 1e-12) {
        seen = true;
        break;
      }
    }
    if (!seen) out.values.push_back(v);
  }
  return out;
}

}  // namespace liectrl
