#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "liectrl/analysis.hpp"
#include "oracles.hpp"

using liectrl::ControlRange;
using liectrl::Derivation;
using liectrl::Finding;
using liectrl::GroupFlags;
using liectrl::LieAlgebra;
using liectrl::LinearSystemSpec;
using liectrl::Mat;
using liectrl::Vec;
using liectrl::Verdict;

namespace {

Vec unit(int d, int i) {
  Vec v = Vec::Zero(d);
  v[i] = 1.0;
  return v;
}

Vec vec1(double a) {
  Vec v(1);
  v[0] = a;
  return v;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v[0] = a;
  v[1] = b;
  return v;
}

Mat diag3(double a, double b, double c) {
  return Eigen::Vector3d(a, b, c).asDiagonal();
}

/// Basis (h, e, f): [h, e] = 2e, [h, f] = -2f, [e, f] = h.
LieAlgebra sl2() {
  return LieAlgebra(3, {{0, 1, Vec(2.0 * unit(3, 1))},
                        {0, 2, Vec(-2.0 * unit(3, 2))},
                        {1, 2, unit(3, 0)}});
}

LinearSystemSpec scalar_system(double rate) {
  return LinearSystemSpec(LieAlgebra::abelian(1), Derivation{Mat::Constant(1, 1, rate)},
                          {vec1(1.0)}, ControlRange::box(vec1(1.0)));
}

LinearSystemSpec heisenberg_system(const Mat& drift, GroupFlags flags = {}) {
  return LinearSystemSpec(LieAlgebra::heisenberg(), Derivation{drift},
                          {unit(3, 0), unit(3, 1)}, ControlRange::box(vec2(1.0, 1.0)), flags);
}

liectrl::ClassificationReport run_classify(const LinearSystemSpec& s,
                                           std::optional<liectrl::NumericEvidence> ev = {}) {
  auto dec = liectrl::decompose(s.algebra, s.drift, s.tol);
  return liectrl::classify(s, dec, ev);
}

}  // namespace

TEST_CASE("box control ranges expose radii, vertices, and margin") {
  ControlRange r = ControlRange::box(vec2(1.0, 2.0));
  CHECK(r.dim() == 2);
  CHECK(r.is_box());
  CHECK(r.vertices().size() == 4);
  CHECK(r.interior_margin() == doctest::Approx(1.0));
  CHECK_THROWS_AS(ControlRange::box(vec2(1.0, -1.0)), liectrl::InputError);
  CHECK_THROWS_AS(ControlRange::box(Vec{}), liectrl::InputError);
}

TEST_CASE("polytope control ranges require 0 strictly inside") {
  ControlRange tri = ControlRange::polytope({vec2(2.0, 0.0), vec2(-1.0, 1.0), vec2(-1.0, -1.0)});
  CHECK(tri.dim() == 2);
  CHECK(!tri.is_box());
  CHECK(tri.interior_margin() > 0.1);

  ControlRange seg = ControlRange::polytope({vec1(-1.0), vec1(2.0)});
  CHECK(seg.interior_margin() == doctest::Approx(1.0));

  CHECK_THROWS_AS(ControlRange::polytope({vec2(1.0, 0.0), vec2(2.0, 0.0), vec2(1.0, 1.0)}),
                  liectrl::InputError);
  CHECK_THROWS_AS(ControlRange::polytope({vec2(0.0, 1.0), vec2(0.0, -1.0), vec2(1.0, 0.0)}),
                  liectrl::InputError);
  CHECK_THROWS_AS(ControlRange::polytope({vec2(1.0, 0.0), vec1(1.0)}), liectrl::InputError);
  CHECK_THROWS_AS(ControlRange::polytope({}), liectrl::InputError);
}

TEST_CASE("system construction validates all ingredients") {
  LieAlgebra h = LieAlgebra::heisenberg();
  CHECK_THROWS_AS(LinearSystemSpec(h, Derivation{diag3(1.0, 1.0, 1.0)}, {unit(3, 0)},
                                   ControlRange::box(vec1(1.0))),
                  liectrl::InputError);
  CHECK_THROWS_AS(LinearSystemSpec(h, Derivation{Mat::Zero(3, 3)}, {},
                                   ControlRange::box(vec1(1.0))),
                  liectrl::InputError);
  CHECK_THROWS_AS(LinearSystemSpec(h, Derivation{Mat::Zero(3, 3)}, {unit(2, 0)},
                                   ControlRange::box(vec1(1.0))),
                  liectrl::InputError);
  CHECK_THROWS_AS(LinearSystemSpec(h, Derivation{Mat::Zero(3, 3)}, {unit(3, 0)},
                                   ControlRange::box(vec2(1.0, 1.0))),
                  liectrl::InputError);
  LieAlgebra broken(3, {{0, 1, unit(3, 0)}, {0, 2, unit(3, 2)}});
  CHECK_THROWS_AS(LinearSystemSpec(broken, Derivation{Mat::Zero(3, 3)}, {unit(3, 0)},
                                   ControlRange::box(vec1(1.0))),
                  liectrl::InputError);

  LinearSystemSpec ok = heisenberg_system(diag3(1.0, -1.0, 0.0));
  CHECK(ok.nilpotent);
  CHECK(ok.solvable);
  CHECK(ok.nil_class == 2);

  LieAlgebra aff(2, {{0, 1, unit(2, 1)}});
  LinearSystemSpec affine(aff, Derivation{Mat::Zero(2, 2)}, {unit(2, 0), unit(2, 1)},
                          ControlRange::box(vec2(1.0, 1.0)));
  CHECK(!affine.nilpotent);
  CHECK(affine.solvable);
  CHECK(!affine.nil_class.has_value());
}

TEST_CASE("rank condition on hand-checked systems") {
  CHECK(liectrl::check_larc(heisenberg_system(diag3(1.0, -1.0, 0.0))));
  LinearSystemSpec central(LieAlgebra::heisenberg(), Derivation{Mat::Zero(3, 3)},
                           {unit(3, 2)}, ControlRange::box(vec1(1.0)));
  CHECK(!liectrl::check_larc(central));

  Mat shift = Mat::Zero(3, 3);
  shift(1, 0) = shift(2, 1) = 1.0;
  LinearSystemSpec krylov(LieAlgebra::abelian(3), Derivation{shift}, {unit(3, 0)},
                          ControlRange::box(vec1(1.0)));
  CHECK(liectrl::check_larc(krylov));
}

TEST_CASE("rank condition matches the classical controllability rank on abelian algebras") {
  std::mt19937 rng(83u);
  LieAlgebra ab = LieAlgebra::abelian(4);
  int deficient_seen = 0;
  for (int k = 0; k < 200; ++k) {
    Mat d(4, 4);
    for (int i = 0; i < 4; ++i) d.row(i) = oracle::random_vec(rng, 4, 1.0).transpose();
    Vec b = oracle::random_vec(rng, 4, 1.0);
    if (k % 4 == 0) {
      // Force a proper invariant subspace containing b so both answers are "no".
      d.bottomLeftCorner(2, 2).setZero();
      b.tail(2).setZero();
      ++deficient_seen;
    }
    LinearSystemSpec s(ab, Derivation{d}, {b}, ControlRange::box(vec1(1.0)));
    Mat bmat(4, 1);
    bmat.col(0) = b;
    bool kalman_full = oracle::kalman_rank(d, bmat, 1e-10) == 4;
    CHECK(liectrl::check_larc(s) == kalman_full);
  }
  CHECK(deficient_seen == 50);
}

TEST_CASE("classification of the scalar expanding system") {
  auto r = run_classify(scalar_system(1.0));
  CHECK(r.larc);
  CHECK(r.hyperbolic);
  CHECK(r.c_exists.value == Verdict::Yes);
  CHECK(r.c_closed.value == Verdict::No);
  CHECK(r.c_open.value == Verdict::Yes);
  CHECK(r.c_equals_group.value == Verdict::No);
  CHECK(r.controllable.value == Verdict::No);
  CHECK(r.c_bounded.value == Verdict::Unknown);
  CHECK(r.c_unique.value == Verdict::Yes);
  CHECK(r.a_equals_group.value == Verdict::Yes);
  CHECK(r.astar_equals_group.value == Verdict::No);
  CHECK(r.equivalences.size() == 2);

  liectrl::NumericEvidence ev{true, true};
  auto with_evidence = run_classify(scalar_system(1.0), ev);
  CHECK(with_evidence.c_bounded.value == Verdict::Yes);
}

TEST_CASE("classification of the scalar contracting system") {
  auto r = run_classify(scalar_system(-1.0));
  CHECK(r.c_closed.value == Verdict::Yes);
  CHECK(r.c_open.value == Verdict::No);
  CHECK(r.c_equals_group.value == Verdict::No);
  CHECK(r.controllable.value == Verdict::No);
  CHECK(r.a_equals_group.value == Verdict::No);
  CHECK(r.astar_equals_group.value == Verdict::Yes);
}

TEST_CASE("classification with a purely imaginary spectrum") {
  auto r = run_classify(heisenberg_system(Mat::Zero(3, 3)));
  CHECK(r.c_closed.value == Verdict::Yes);
  CHECK(r.c_open.value == Verdict::Yes);
  CHECK(r.c_equals_group.value == Verdict::Yes);
  CHECK(r.controllable.value == Verdict::Yes);
  CHECK(r.c_bounded.value == Verdict::No);
  CHECK(r.c_unique.value == Verdict::Yes);
  CHECK(r.g0_compact == false);
}

TEST_CASE("classification of the graded and expanding heisenberg systems") {
  auto graded = run_classify(heisenberg_system(diag3(1.0, -1.0, 0.0)));
  CHECK(graded.dim_plus == 1);
  CHECK(graded.dim_zero == 1);
  CHECK(graded.dim_minus == 1);
  CHECK(graded.c_closed.value == Verdict::No);
  CHECK(graded.c_open.value == Verdict::No);
  CHECK(graded.c_equals_group.value == Verdict::No);
  CHECK(graded.controllable.value == Verdict::No);
  CHECK(graded.c_bounded.value == Verdict::No);  // not hyperbolic
  CHECK(graded.c_unique.value == Verdict::Yes);  // solvable

  auto expanding = run_classify(heisenberg_system(diag3(1.0, 1.0, 2.0)));
  CHECK(expanding.hyperbolic);
  CHECK(expanding.c_closed.value == Verdict::No);
  CHECK(expanding.c_open.value == Verdict::Yes);
  CHECK(expanding.c_bounded.value == Verdict::Unknown);
  liectrl::NumericEvidence ev{true, true};
  CHECK(run_classify(heisenberg_system(diag3(1.0, 1.0, 2.0)), ev).c_bounded.value ==
        Verdict::Yes);
  liectrl::NumericEvidence partial{true, false};
  CHECK(run_classify(heisenberg_system(diag3(1.0, 1.0, 2.0)), partial).c_bounded.value ==
        Verdict::Unknown);
}

TEST_CASE("nilpotent-only rules gate on simple connectedness") {
  GroupFlags torus_like;
  torus_like.simply_connected = false;
  auto r = run_classify(heisenberg_system(Mat::Zero(3, 3), torus_like));
  CHECK(r.c_closed.value == Verdict::Unknown);
  CHECK(r.c_open.value == Verdict::Unknown);
  CHECK(r.c_equals_group.value == Verdict::Unknown);
  CHECK(r.c_bounded.value == Verdict::Unknown);
  // The general sufficiency for a purely imaginary spectrum still applies.
  CHECK(r.controllable.value == Verdict::Yes);
  CHECK(r.c_unique.value == Verdict::Yes);  // solvable branch
  CHECK(!r.g0_compact.has_value());
}

TEST_CASE("semisimple systems leave undecidable questions unknown") {
  LieAlgebra g = sl2();
  LinearSystemSpec s(g, Derivation{Mat::Zero(3, 3)}, {unit(3, 0), unit(3, 1), unit(3, 2)},
                     ControlRange::box(Eigen::Vector3d(1.0, 1.0, 1.0)));
  CHECK(!s.nilpotent);
  CHECK(!s.solvable);
  auto r = run_classify(s);
  CHECK(r.c_closed.value == Verdict::Unknown);
  CHECK(r.controllable.value == Verdict::Yes);  // zero spectrum, finite center assumed
  CHECK(r.c_unique.value == Verdict::Unknown);

  GroupFlags wild;
  wild.finite_semisimple_center = false;
  LinearSystemSpec s2(g, Derivation{Mat::Zero(3, 3)}, {unit(3, 0), unit(3, 1), unit(3, 2)},
                      ControlRange::box(Eigen::Vector3d(1.0, 1.0, 1.0)), wild);
  auto r2 = run_classify(s2);
  CHECK(r2.controllable.value == Verdict::Unknown);
  CHECK(r2.equivalences.empty());

  GroupFlags compact_center;
  compact_center.g0_compact = true;
  LinearSystemSpec s3(g, Derivation{Mat::Zero(3, 3)}, {unit(3, 0), unit(3, 1), unit(3, 2)},
                      ControlRange::box(Eigen::Vector3d(1.0, 1.0, 1.0)), compact_center);
  CHECK(run_classify(s3).c_unique.value == Verdict::Yes);
}

TEST_CASE("rank failure turns every verdict unknown") {
  LinearSystemSpec central(LieAlgebra::heisenberg(), Derivation{Mat::Zero(3, 3)},
                           {unit(3, 2)}, ControlRange::box(vec1(1.0)));
  auto r = run_classify(central);
  CHECK(!r.larc);
  CHECK(!r.a_open_assumed);
  for (const Finding* f : {&r.c_exists, &r.c_closed, &r.c_open, &r.c_equals_group,
                           &r.controllable, &r.c_bounded, &r.c_unique}) {
    CHECK(f->value == Verdict::Unknown);
  }
  CHECK(r.equivalences.empty());
}

TEST_CASE("decided findings carry hypotheses and unknowns carry notes") {
  std::vector<liectrl::ClassificationReport> reports;
  reports.push_back(run_classify(scalar_system(1.0)));
  reports.push_back(run_classify(scalar_system(-1.0)));
  reports.push_back(run_classify(heisenberg_system(Mat::Zero(3, 3))));
  reports.push_back(run_classify(heisenberg_system(diag3(1.0, -1.0, 0.0))));
  reports.push_back(run_classify(heisenberg_system(diag3(1.0, 1.0, 2.0))));
  for (const auto& r : reports) {
    for (const Finding* f : {&r.c_exists, &r.c_closed, &r.c_open, &r.c_equals_group,
                             &r.controllable, &r.c_bounded, &r.c_unique, &r.a_equals_group,
                             &r.astar_equals_group}) {
      CHECK(!f->rule.empty());
      CHECK(!f->statement.empty());
      if (f->value != Verdict::Unknown) {
        CHECK(!f->hypotheses.empty());
      } else {
        CHECK(!f->note.empty());
      }
    }
  }
}

TEST_CASE("verdicts are invariant under positive rescaling of the drift") {
  std::vector<Mat> dspace = oracle::derivation_space(LieAlgebra::heisenberg());
  std::mt19937 rng(97u);
  std::uniform_real_distribution<double> logt(-0.3, 2.0);
  int tested = 0;
  for (int k = 0; k < 200; ++k) {
    Vec coeff = oracle::random_vec(rng, static_cast<int>(dspace.size()), 1.0);
    Mat d = Mat::Zero(3, 3);
    for (size_t m = 0; m < dspace.size(); ++m) d += coeff[static_cast<int>(m)] * dspace[m];
    double t = std::pow(10.0, logt(rng));
    // Both spectra must resolve the sign of every real part.
    double min_re = 1e9;
    for (const auto& c : liectrl::spectrum(d, 1e-7)) {
      if (c.value.real() != 0.0) min_re = std::min(min_re, std::abs(c.value.real()));
    }
    if (min_re < 1e-5) continue;
    ++tested;
    auto r1 = run_classify(heisenberg_system(d));
    auto r2 = run_classify(heisenberg_system(Mat(t * d)));
    CHECK(r1.c_closed.value == r2.c_closed.value);
    CHECK(r1.c_open.value == r2.c_open.value);
    CHECK(r1.c_equals_group.value == r2.c_equals_group.value);
    CHECK(r1.controllable.value == r2.controllable.value);
    CHECK(r1.hyperbolic == r2.hyperbolic);
  }
  CHECK(tested >= 190);
}

TEST_CASE("decomposition identities hold on the solvable examples") {
  for (const Mat& d : {Mat(diag3(1.0, -1.0, 0.0)), Mat(diag3(1.0, 1.0, 2.0)),
                       Mat(Mat::Zero(3, 3))}) {
    LinearSystemSpec s = heisenberg_system(d);
    auto dec = liectrl::decompose(s.algebra, s.drift, s.tol);
    auto rep = liectrl::decomposition_identities(s, dec);
    CHECK(rep.applicable);
    CHECK(rep.ok());
  }
  LieAlgebra g = sl2();
  LinearSystemSpec s(g, Derivation{Mat::Zero(3, 3)}, {unit(3, 0), unit(3, 1), unit(3, 2)},
                     ControlRange::box(Eigen::Vector3d(1.0, 1.0, 1.0)));
  auto dec = liectrl::decompose(s.algebra, s.drift, s.tol);
  CHECK(!liectrl::decomposition_identities(s, dec).applicable);
}

TEST_CASE("verdict names") {
  CHECK(liectrl::to_string(Verdict::Yes) == "yes");
  CHECK(liectrl::to_string(Verdict::No) == "no");
  CHECK(liectrl::to_string(Verdict::Unknown) == "unknown");
}
