#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "liectrl/config.hpp"
#include "liectrl/io.hpp"

using namespace liectrl;
using nlohmann::json;

namespace {

Vec unit(int n, int k) {
  Vec v = Vec::Zero(n);
  v[k] = 1.0;
  return v;
}

/// Graded 3-dimensional nilpotent example used throughout the io tests.
json graded_config() {
  return json{
      {"name", "graded"},
      {"algebra",
       {{"dim", 3},
        {"brackets", json::array({{{"i", 1}, {"j", 2}, {"result", {0.0, 0.0, 1.0}}}})},
        {"labels", {"e1", "e2", "e3"}}}},
      {"drift", {{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 0.0}}},
      {"controls", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}},
      {"omega", {{"radii", {1.0, 1.0}}}},
      {"flags", {{"simply_connected", true}, {"g0_compact", "auto"}}},
      {"simulation",
       {{"box", {{-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}}},
        {"cells_per_axis", 21},
        {"horizon", 6.0},
        {"dwell", 0.1},
        {"dt", 0.01},
        {"trajectory_dt", 0.001},
        {"threads", 2}}},
      {"checks",
       {{"duality_horizon", 1.5},
        {"semigroup_tau1", 0.5},
        {"semigroup_tau2", 0.5},
        {"semigroup_cells_per_axis", 21}}}};
}

json minimal_config() {
  return json{{"algebra", {{"dim", 1}}},
              {"drift", {{0.0}}},
              {"controls", {{1.0}}},
              {"omega", {{"radii", {1.0}}}}};
}

}  // namespace

TEST_CASE("config parsing round trips every section") {
  SystemConfig cfg = parse_system_config(graded_config());

  CHECK(cfg.name == "graded");
  CHECK(cfg.system.algebra.dim() == 3);
  // File bracket indices are 1-based; storage is 0-based.
  CHECK(cfg.system.algebra.structure(2, 0, 1) == doctest::Approx(1.0));
  CHECK(cfg.system.drift.matrix(0, 0) == doctest::Approx(1.0));
  CHECK(cfg.system.drift.matrix(1, 1) == doctest::Approx(-1.0));
  REQUIRE(cfg.system.controls.size() == 2);
  CHECK(cfg.system.controls[0].isApprox(unit(3, 0)));
  CHECK(cfg.system.omega.is_box());
  CHECK(cfg.system.omega.dim() == 2);
  CHECK(cfg.system.flags.simply_connected);
  CHECK_FALSE(cfg.system.flags.g0_compact.has_value());  // "auto"

  CHECK(cfg.sim.box(0, 0) == doctest::Approx(-2.0));
  CHECK(cfg.sim.cells == std::vector<int>{21, 21, 21});
  CHECK(cfg.sim.horizon == doctest::Approx(6.0));
  CHECK(cfg.sim.dwell == doctest::Approx(0.1));
  CHECK(cfg.sim.dt == doctest::Approx(0.01));
  CHECK(cfg.sim.trajectory_dt == doctest::Approx(0.001));
  CHECK(cfg.sim.threads == 2);

  REQUIRE(cfg.checks.duality_horizon.has_value());
  CHECK(*cfg.checks.duality_horizon == doctest::Approx(1.5));
  REQUIRE(cfg.checks.semigroup_cells.has_value());
  // A scalar count applies to every axis.
  CHECK(*cfg.checks.semigroup_cells == std::vector<int>{21, 21, 21});
}

TEST_CASE("config defaults fill in missing sections") {
  SystemConfig cfg = parse_system_config(minimal_config());

  CHECK(cfg.name == "system");
  CHECK(cfg.system.flags.simply_connected);
  CHECK(cfg.system.flags.finite_semisimple_center);
  CHECK(cfg.sim.box(0, 0) == doctest::Approx(-3.0));
  CHECK(cfg.sim.box(0, 1) == doctest::Approx(3.0));
  CHECK(cfg.sim.cells == std::vector<int>{151});
  CHECK(cfg.sim.horizon == doctest::Approx(8.0));
  CHECK(cfg.sim.dwell == doctest::Approx(0.1));
  CHECK(cfg.sim.dt == doctest::Approx(1e-2));
  CHECK(cfg.sim.trajectory_dt == doctest::Approx(1e-3));
  CHECK(cfg.sim.threads == 1);
  CHECK_FALSE(cfg.checks.duality_horizon.has_value());
  CHECK_FALSE(cfg.checks.semigroup_tau1.has_value());
  CHECK_FALSE(cfg.checks.semigroup_cells.has_value());
}

TEST_CASE("config validation rejects malformed input") {
  json base = graded_config();

  SUBCASE("missing sections") {
    for (const char* key : {"algebra", "drift", "controls", "omega"}) {
      json broken = base;
      broken.erase(key);
      CHECK_THROWS_AS(parse_system_config(broken), InputError);
    }
  }

  SUBCASE("bracket index conventions") {
    json j = base;
    j["algebra"]["brackets"][0]["i"] = 0;  // 1-based in files
    CHECK_THROWS_AS(parse_system_config(j), InputError);
    j = base;
    j["algebra"]["brackets"][0]["i"] = 2;
    j["algebra"]["brackets"][0]["j"] = 2;  // requires i < j
    CHECK_THROWS_AS(parse_system_config(j), InputError);
    j = base;
    j["algebra"]["brackets"][0]["j"] = 4;  // beyond dim
    CHECK_THROWS_AS(parse_system_config(j), InputError);
    j = base;
    j["algebra"]["brackets"][0]["result"] = {0.0, 0.0};  // wrong length
    CHECK_THROWS_AS(parse_system_config(j), InputError);
  }

  SUBCASE("structure constants violating the Jacobi identity") {
    json j = base;
    j["algebra"]["brackets"].push_back({{"i", 1}, {"j", 3}, {"result", {1.0, 0.0, 0.0}}});
    CHECK_THROWS_WITH_AS(parse_system_config(j), doctest::Contains("Jacobi"), InputError);
  }

  SUBCASE("drift must be a derivation") {
    json j = base;
    j["drift"] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    CHECK_THROWS_AS(parse_system_config(j), InputError);
  }

  SUBCASE("omega shape") {
    json j = base;
    j["omega"] = {{"radii", {1.0}}};  // two controls expect two radii
    CHECK_THROWS_AS(parse_system_config(j), InputError);
    j["omega"] = json::object();
    CHECK_THROWS_AS(parse_system_config(j), InputError);
  }

  SUBCASE("simulation parameters") {
    json j = base;
    j["simulation"]["dwell"] = -0.1;
    CHECK_THROWS_AS(parse_system_config(j), InputError);
    j = base;
    j["simulation"]["threads"] = 0;
    CHECK_THROWS_AS(parse_system_config(j), InputError);
    j = base;
    j["simulation"]["cells_per_axis"] = {21, 21};  // one per axis or a scalar
    CHECK_THROWS_AS(parse_system_config(j), InputError);
  }

  SUBCASE("flags") {
    json j = base;
    j["flags"]["g0_compact"] = "maybe";
    CHECK_THROWS_AS(parse_system_config(j), InputError);
  }

  SUBCASE("algebra dimension bounds") {
    json j = minimal_config();
    j["algebra"]["dim"] = 0;
    CHECK_THROWS_AS(parse_system_config(j), InputError);
    j["algebra"]["dim"] = 33;
    CHECK_THROWS_AS(parse_system_config(j), InputError);
  }
}

TEST_CASE("shipped configs load and satisfy the rank condition") {
  const std::string dir = std::string(LIECTRL_SOURCE_DIR) + "/configs/";
  for (const char* name :
       {"scalar_unstable", "scalar_stable", "planar_hyperbolic", "heisenberg_zero_spectrum",
        "heisenberg_graded", "heisenberg_expanding"}) {
    CAPTURE(name);
    SystemConfig cfg = load_system_config(dir + name + ".json");
    CHECK(cfg.name == name);
    CHECK(check_larc(cfg.system));
    // Every shipped box is centered so the grid BFS can seed the identity.
    CHECK(make_grid(cfg.sim.box, cfg.sim.cells).cell_of(Vec::Zero(cfg.system.algebra.dim()))
              .has_value());
    const long long steps = std::llround(cfg.sim.dwell / cfg.sim.dt);
    CHECK(std::abs(steps * cfg.sim.dt - cfg.sim.dwell) <= 1e-9);
  }
}

TEST_CASE("config file errors are reported with context") {
  CHECK_THROWS_WITH_AS(load_system_config("/nonexistent/liectrl.json"),
                       doctest::Contains("cannot open"), InputError);

  const std::filesystem::path bad = std::filesystem::temp_directory_path() / "liectrl_bad.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_WITH_AS(load_system_config(bad.string()), doctest::Contains("parse error"),
                       InputError);
  std::filesystem::remove(bad);
}

TEST_CASE("report serialization shapes") {
  SystemConfig cfg = parse_system_config(graded_config());
  const LinearSystemSpec& s = cfg.system;

  json v = validation_to_json(validate_algebra(s.algebra, s.tol.alg));
  CHECK(v["antisymmetry_ok"].get<bool>());
  CHECK(v["jacobi_ok"].get<bool>());

  SpectralDecomposition dec = decompose(s.algebra, s.drift, s.tol);
  json sd = spectral_to_json(dec);
  CHECK(sd["dim_plus"].get<int>() == 1);
  CHECK(sd["dim_zero"].get<int>() == 1);
  CHECK(sd["dim_minus"].get<int>() == 1);
  CHECK_FALSE(sd["hyperbolic"].get<bool>());
  CHECK(sd["eigenvalues"].size() == 3);
  REQUIRE(sd["g_plus"].size() == 1);
  CHECK(sd["g_plus"][0].size() == 3);

  json g = grading_to_json(verify_grading(s.algebra, s.drift, s.tol));
  CHECK(g["pass"].get<bool>());
  CHECK(g["worst_residual"].get<double>() < 1e-9);
  CHECK(g["entries"].size() > 0);

  ClassificationReport report = classify(s, dec);
  json c = classification_to_json(report);
  CHECK(c["larc"].get<bool>());
  CHECK(c["nilpotent"].get<bool>());
  const std::string closed = c["verdicts"]["c_closed"]["value"].get<std::string>();
  CHECK(closed == "no");  // dim g+ > 0
  CHECK(c["verdicts"]["c_closed"]["hypotheses"].is_array());
  CHECK(c["verdicts"]["c_closed"]["rule"].get<std::string>() != "");

  std::string text = classification_to_text(report);
  CHECK(text.find("rank condition: holds") != std::string::npos);
  CHECK(text.find("control set closed: no") != std::string::npos);
  CHECK(text.find("dim g0 = 1") != std::string::npos);

  json ident = identities_to_json(decomposition_identities(s, dec));
  CHECK(ident["applicable"].get<bool>());
  CHECK(ident["plus_zero_minus_ok"].get<bool>());
  CHECK(ident["minus_zero_plus_ok"].get<bool>());
}

TEST_CASE("grid summaries and cross checks") {
  Mat d(1, 1);
  d << 1.0;
  LinearSystemSpec s(LieAlgebra::abelian(1), Derivation{d}, {unit(1, 0)},
                     ControlRange::box(Vec::Ones(1)));
  Mat box(1, 2);
  box << -3.0, 3.0;
  GridGeometry geom = make_grid(box, {151});
  ControlSample sample = ControlSample::standard(ControlRange::box(Vec::Ones(1)), 0.1);
  SpectralDecomposition dec = decompose(s.algebra, s.drift, s.tol);

  ControlSetResult out = control_set_estimate(s, 8.0, geom, sample, {}, &dec);
  json cj = controlset_to_json(out);
  CHECK(cj["reach"]["kind"].get<std::string>() == "reachable");
  CHECK(cj["reach"]["occupied"].get<std::size_t>() == out.reach.occupied_count());
  CHECK(cj["estimate"]["fraction_of_box"].get<double>() ==
        doctest::Approx(out.estimate.fraction_of_box()));
  CHECK(cj["duality"]["ratio"].get<double>() == doctest::Approx(out.duality.ratio));
  CHECK(cj.contains("reach_in_gminus_bounded"));

  // Expanding scalar drift: reach fills the group, the control set is the
  // bounded open interval. Numerics must agree with each decided verdict.
  REQUIRE(out.reach_in_gminus_bounded.has_value());
  REQUIRE(out.controllable_in_gplus_bounded.has_value());
  NumericEvidence ev{*out.reach_in_gminus_bounded, *out.controllable_in_gplus_bounded};
  ClassificationReport report = classify(s, dec, ev);

  CrossCheck reach_check = cross_check_reach(report, out.reach);
  CHECK(reach_check.lines.size() == 1);
  CHECK(reach_check.all_agree);

  CrossCheck set_check = cross_check_controlset(report, out);
  CHECK(set_check.lines.size() == 4);
  CHECK(set_check.all_agree);

  // Undecided verdicts are skipped, not guessed: without numeric evidence the
  // boundedness rule stays Unknown and its line disappears.
  ClassificationReport no_evidence = classify(s, dec);
  CrossCheck fewer = cross_check_controlset(no_evidence, out);
  CHECK(fewer.lines.size() == 3);
}

TEST_CASE("grid and trajectory csv are deterministic") {
  Mat box(2, 2);
  box << -1.0, 1.0, -1.0, 1.0;
  GridGeometry geom = make_grid(box, {5, 5});
  OccupancyGrid g(geom, GridKind::Reachable, 1.0);
  g.set(geom.flatten({2, 2}));
  g.set(geom.flatten({0, 1}));

  std::string csv = grid_to_csv(g);
  CHECK(csv.find("kind,reachable") != std::string::npos);
  CHECK(csv.find("axis,lo,hi,cells") != std::string::npos);
  CHECK(csv.find("i0,i1") != std::string::npos);
  CHECK(csv.find("0,1\n") != std::string::npos);
  CHECK(csv.find("2,2\n") != std::string::npos);
  CHECK(csv.find("0,1\n") < csv.find("2,2\n"));  // ascending cell order
  CHECK(csv == grid_to_csv(g));

  Trajectory t;
  t.t = {0.0, 0.5};
  Vec a(2), b(2);
  a << 1.0, 2.0;
  b << 3.0, 4.25;
  t.x = {a, b};
  std::string tcsv = trajectory_to_csv(t);
  CHECK(tcsv.find("t,x_1,x_2") == 0);
  CHECK(tcsv.find("\n0,1,2\n") != std::string::npos);
  CHECK(tcsv.find("\n0.5,3,4.25\n") != std::string::npos);
  CHECK(tcsv == trajectory_to_csv(t));
}
