#include "liectrl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace liectrl {

namespace {

constexpr const char* kHypAOpen = "reachable set of the identity open (assumed from rank condition)";
constexpr const char* kHypOmega = "0 interior to the control range";
constexpr const char* kHypNilpotent = "group nilpotent";
constexpr const char* kHypSimplyConnected = "group simply connected";
constexpr const char* kHypFiniteCenter = "finite semisimple center";
constexpr const char* kHypSolvable = "group solvable";
constexpr const char* kHypG0Compact = "central subgroup of the zero-real-part spectrum compact";
constexpr const char* kHypHyperbolic = "derivation hyperbolic";

std::vector<Vec> sampled_directions(int m, const std::vector<Vec>& vertices) {
  std::vector<Vec> dirs;
  for (int i = 0; i < m; ++i) {
    Vec e = Vec::Zero(m);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  for (const Vec& v : vertices) {
    double n = v.norm();
    if (n > 0.0) dirs.push_back(-v / n);
  }
  std::mt19937 rng(20240901u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < 512; ++k) {
    Vec u(m);
    for (int i = 0; i < m; ++i) u[i] = gauss(rng);
    double n = u.norm();
    if (n > 1e-12) dirs.push_back(u / n);
  }
  return dirs;
}

}  // namespace

ControlRange ControlRange::box(const Vec& radii) {
  if (radii.size() == 0) throw InputError("control range must have positive dimension");
  if (radii.minCoeff() <= 0.0) throw InputError("box control range needs positive radii");
  ControlRange r;
  r.dim_ = static_cast<int>(radii.size());
  r.is_box_ = true;
  r.radii_ = radii;
  std::vector<Vec> verts;
  for (int mask = 0; mask < (1 << r.dim_); ++mask) {
    Vec v(r.dim_);
    for (int i = 0; i < r.dim_; ++i) v[i] = (mask >> i & 1) ? radii[i] : -radii[i];
    verts.push_back(v);
  }
  r.vertices_ = std::move(verts);
  r.margin_ = radii.minCoeff();
  return r;
}

ControlRange ControlRange::polytope(std::vector<Vec> vertices) {
  if (vertices.empty()) throw InputError("polytope control range needs vertices");
  const int m = static_cast<int>(vertices.front().size());
  if (m == 0) throw InputError("control range must have positive dimension");
  for (const Vec& v : vertices) {
    if (v.size() != m) throw InputError("polytope vertices must share one dimension");
  }
  ControlRange r;
  r.dim_ = m;
  r.is_box_ = false;
  r.vertices_ = std::move(vertices);
  // Sampled support function; the interior requirement is min over directions
  // of max_v <u, v> > 0. Sampling can only overestimate, so demand slack.
  double margin = std::numeric_limits<double>::infinity();
  for (const Vec& u : sampled_directions(m, r.vertices_)) {
    double support = -std::numeric_limits<double>::infinity();
    for (const Vec& v : r.vertices_) support = std::max(support, u.dot(v));
    margin = std::min(margin, support);
  }
  if (!(margin > 1e-9)) {
    throw InputError("control range must contain 0 in its interior");
  }
  r.margin_ = margin;
  return r;
}

LinearSystemSpec::LinearSystemSpec(LieAlgebra algebra_in, Derivation drift_in,
                                   std::vector<Vec> controls_in, ControlRange omega_in,
                                   GroupFlags flags_in, Tolerances tol_in)
    : algebra(std::move(algebra_in)),
      drift(std::move(drift_in)),
      controls(std::move(controls_in)),
      omega(std::move(omega_in)),
      flags(flags_in),
      tol(tol_in) {
  ValidationReport v = validate_algebra(algebra, tol.alg);
  if (!v.ok()) {
    throw InputError("structure constants violate antisymmetry or Jacobi, residual " +
                     std::to_string(std::max(v.antisymmetry_residual, v.jacobi_residual)));
  }
  DerivationCheck leibniz = is_derivation(algebra, drift.matrix, tol.alg);
  if (!leibniz.ok) {
    throw InputError("drift is not a derivation, Leibniz residual " +
                     std::to_string(leibniz.residual));
  }
  if (controls.empty()) throw InputError("at least one control direction is required");
  for (const Vec& b : controls) {
    if (b.size() != algebra.dim()) {
      throw InputError("control direction has wrong dimension");
    }
  }
  if (omega.dim() != static_cast<int>(controls.size())) {
    throw InputError("control range dimension must match the number of controls");
  }
  nilpotent = is_nilpotent(algebra, tol.rank);
  solvable = nilpotent || is_solvable(algebra, tol.rank);
  nil_class = nilpotent ? nilpotency_class(algebra, tol.rank) : std::nullopt;
}

bool check_larc(const LinearSystemSpec& s) {
  Mat seeds(s.algebra.dim(), s.controls.size());
  for (size_t j = 0; j < s.controls.size(); ++j) seeds.col(j) = s.controls[j];
  Subalgebra closure = d_invariant_closure(s.algebra, s.drift, seeds, s.tol.rank);
  return closure.dim() == s.algebra.dim();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "unknown";
  }
}

namespace {

Finding finding(Verdict v, std::string rule, std::string statement,
                std::vector<std::string> hyps, std::string note = {}) {
  return Finding{v, std::move(rule), std::move(statement), std::move(hyps), std::move(note)};
}

Finding unknown(std::string rule, std::string statement, std::string note) {
  return Finding{Verdict::Unknown, std::move(rule), std::move(statement), {}, std::move(note)};
}

}  // namespace

ClassificationReport classify(const LinearSystemSpec& s, const SpectralDecomposition& dec,
                              const std::optional<NumericEvidence>& evidence) {
  ClassificationReport r;
  r.larc = check_larc(s);
  r.a_open_assumed = r.larc;
  r.nilpotent = s.nilpotent;
  r.solvable = s.solvable;
  r.dim_plus = dec.g_plus.dim();
  r.dim_zero = dec.g_zero.dim();
  r.dim_minus = dec.g_minus.dim();
  r.hyperbolic = dec.hyperbolic;

  const int d = s.algebra.dim();
  const bool a_open = r.a_open_assumed;
  // Solvable groups carry no semisimple part, so the center assumption is free.
  const bool finite_center = s.solvable || s.flags.finite_semisimple_center;
  if (s.flags.g0_compact.has_value()) {
    r.g0_compact = s.flags.g0_compact;
  } else if (s.flags.simply_connected && s.nilpotent) {
    r.g0_compact = (r.dim_zero == 0);
  }

  const std::vector<std::string> base_hyps = {kHypAOpen, kHypOmega};
  std::vector<std::string> nil_hyps = {kHypNilpotent, kHypSimplyConnected, kHypAOpen};
  const bool nil_case = s.nilpotent && s.flags.simply_connected && a_open;

  // R1: existence of a control set with nonempty interior around the identity.
  if (a_open) {
    r.c_exists = finding(Verdict::Yes, "R1",
                         "an open reachable set around the identity yields a control set "
                         "with nonempty interior containing the identity",
                         base_hyps);
  } else {
    r.c_exists = unknown("R1",
                         "an open reachable set around the identity yields a control set "
                         "with nonempty interior containing the identity",
                         "openness of the reachable set is not established");
  }

  // R2 / R3 / R4 / R5: spectral splits on simply connected nilpotent groups.
  const std::string stmt_closed =
      "on a simply connected nilpotent group with open reachable set, the control set is "
      "closed iff no eigenvalue of the derivation has positive real part";
  const std::string stmt_open =
      "on a simply connected nilpotent group with open reachable set, the control set is "
      "open iff no eigenvalue of the derivation has negative real part";
  const std::string stmt_whole =
      "on a simply connected nilpotent group with open reachable set, the control set is "
      "the whole group iff every eigenvalue of the derivation is purely imaginary";
  const std::string stmt_controllable =
      "the system is controllable iff every eigenvalue of the derivation has zero real "
      "part (simply connected nilpotent group, open reachable set)";
  const std::string stmt_a_whole =
      "on a simply connected nilpotent group with open reachable set, the reachable set "
      "is the whole group iff no eigenvalue of the derivation has negative real part";
  const std::string stmt_astar_whole =
      "on a simply connected nilpotent group with open reachable set, the controllable "
      "set is the whole group iff no eigenvalue of the derivation has positive real part";
  if (nil_case) {
    r.c_closed = finding(r.dim_plus == 0 ? Verdict::Yes : Verdict::No, "R2", stmt_closed,
                         nil_hyps);
    r.c_open = finding(r.dim_minus == 0 ? Verdict::Yes : Verdict::No, "R3", stmt_open,
                       nil_hyps);
    r.c_equals_group = finding(r.dim_zero == d ? Verdict::Yes : Verdict::No, "R4",
                               stmt_whole, nil_hyps);
    r.controllable = finding(r.dim_zero == d ? Verdict::Yes : Verdict::No, "R5",
                             stmt_controllable, nil_hyps);
    r.a_equals_group = finding(r.dim_minus == 0 ? Verdict::Yes : Verdict::No, "R8",
                               stmt_a_whole, nil_hyps);
    r.astar_equals_group = finding(r.dim_plus == 0 ? Verdict::Yes : Verdict::No, "R8",
                                   stmt_astar_whole, nil_hyps);
  } else {
    const std::string gap = "requires a simply connected nilpotent group with open reachable set";
    r.c_closed = unknown("R2", stmt_closed, gap);
    r.c_open = unknown("R3", stmt_open, gap);
    r.c_equals_group = unknown("R4", stmt_whole, gap);
    r.a_equals_group = unknown("R8", stmt_a_whole, gap);
    r.astar_equals_group = unknown("R8", stmt_astar_whole, gap);
    if (a_open && finite_center && r.dim_zero == d) {
      r.controllable = finding(
          Verdict::Yes, "R5",
          "a spectrum with all real parts zero is sufficient for controllability on "
          "groups with finite semisimple center and open reachable set",
          {kHypAOpen, kHypFiniteCenter});
    } else {
      r.controllable = unknown("R5", stmt_controllable,
                               "no controllability criterion applies with these flags");
    }
  }

  // R6: boundedness of the control set (simply connected nilpotent groups).
  const std::string stmt_bounded =
      "on a simply connected nilpotent group with open reachable set, the control set is "
      "bounded iff the derivation is hyperbolic and the closures of the reachable set in "
      "the contracting subgroup and of the controllable set in the expanding subgroup "
      "are compact";
  if (nil_case) {
    if (!dec.hyperbolic) {
      r.c_bounded = finding(Verdict::No, "R6", stmt_bounded, nil_hyps,
                            "the derivation is not hyperbolic");
    } else if (evidence && evidence->reach_in_gminus_bounded &&
               evidence->controllable_in_gplus_bounded) {
      std::vector<std::string> hyps = nil_hyps;
      hyps.push_back(kHypHyperbolic);
      hyps.push_back("closure of the reachable set in the contracting subgroup observed compact (numerical)");
      hyps.push_back("closure of the controllable set in the expanding subgroup observed compact (numerical)");
      r.c_bounded = finding(Verdict::Yes, "R6", stmt_bounded, hyps);
    } else {
      r.c_bounded = unknown("R6", stmt_bounded,
                            "hyperbolicity holds; compactness of the restricted closures "
                            "was not verified numerically");
    }
  } else {
    r.c_bounded = unknown("R6", stmt_bounded,
                          "requires a simply connected nilpotent group with open reachable set");
  }

  // R7: uniqueness of the control set with nonempty interior.
  const std::string stmt_unique =
      "the control set containing the identity with nonempty interior is unique when the "
      "group is solvable or the central subgroup of the zero-real-part spectrum is compact";
  if (a_open && finite_center && (s.solvable || r.g0_compact == true)) {
    std::vector<std::string> hyps = {kHypAOpen, kHypFiniteCenter};
    hyps.push_back(s.solvable ? kHypSolvable : kHypG0Compact);
    r.c_unique = finding(Verdict::Yes, "R7", stmt_unique, hyps);
  } else {
    r.c_unique = unknown("R7", stmt_unique,
                         "needs an open reachable set, finite semisimple center, and "
                         "solvability or a compact central subgroup");
  }

  // R8: general equivalences, recorded and used as cross checks.
  if (a_open && finite_center) {
    r.equivalences.push_back(
        "the control set is closed iff the controllable set is the whole group");
    r.equivalences.push_back(
        "the control set is open iff the reachable set is the whole group");
  }

  auto decided = [](const Finding& f) { return f.value != Verdict::Unknown; };
  auto expect = [](bool cond, const char* what) {
    if (!cond) {
      throw InconsistencyError(std::string("classification rules disagree: ") + what);
    }
  };
  if (decided(r.c_closed) && decided(r.astar_equals_group)) {
    expect(r.c_closed.value == r.astar_equals_group.value,
           "closedness must match the controllable set filling the group");
  }
  if (decided(r.c_open) && decided(r.a_equals_group)) {
    expect(r.c_open.value == r.a_equals_group.value,
           "openness must match the reachable set filling the group");
  }
  if (r.c_equals_group.value == Verdict::Yes) {
    expect(r.c_open.value == Verdict::Yes && r.c_closed.value == Verdict::Yes,
           "a control set equal to the group is open and closed");
  }
  if (decided(r.controllable) && decided(r.c_equals_group)) {
    expect(r.controllable.value == r.c_equals_group.value,
           "controllability is equivalent to the control set filling the group");
  }
  if (r.c_open.value == Verdict::Yes && r.c_closed.value == Verdict::Yes) {
    expect(r.c_equals_group.value == Verdict::Yes,
           "an open and closed control set on a connected group fills it");
  }
  return r;
}

IdentityReport decomposition_identities(const LinearSystemSpec& s,
                                        const SpectralDecomposition& dec) {
  IdentityReport out;
  std::optional<bool> g0_compact = s.flags.g0_compact;
  if (!g0_compact && s.flags.simply_connected && s.nilpotent) {
    g0_compact = (dec.g_zero.dim() == 0);
  }
  out.applicable = s.solvable || g0_compact == true;
  const int d = s.algebra.dim();
  auto spans_all = [&](const Subalgebra& x, const Subalgebra& y) {
    Mat joint(d, x.dim() + y.dim());
    joint << x.basis(), y.basis();
    return Subalgebra::span(s.algebra, joint, s.tol.rank).dim() == d &&
           x.dim() + y.dim() == d;
  };
  out.plus_zero_minus_ok = spans_all(dec.g_plus_zero, dec.g_minus);
  out.minus_zero_plus_ok = spans_all(dec.g_minus_zero, dec.g_plus);
  return out;
}

}  // namespace liectrl
