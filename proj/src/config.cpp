#include "liectrl/config.hpp"

#include <fstream>

namespace liectrl {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("config is missing \"") + key + "\"");
  return *it;
}

Vec parse_vector(const json& j, int expected, const char* what) {
  if (!j.is_array() || (expected >= 0 && static_cast<int>(j.size()) != expected)) {
    throw InputError(std::string(what) + " must be an array of " + std::to_string(expected) +
                     " numbers");
  }
  Vec v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + " must contain numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Mat parse_matrix(const json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    throw InputError(std::string(what) + " must be a " + std::to_string(rows) + " x " +
                     std::to_string(cols) + " array");
  }
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) m.row(r) = parse_vector(j[static_cast<size_t>(r)], cols, what).transpose();
  return m;
}

LieAlgebra parse_algebra(const json& j) {
  const int dim = require(j, "dim").get<int>();
  if (dim <= 0 || dim > 32) throw InputError("algebra dim must be in [1, 32]");
  std::vector<BracketEntry> entries;
  if (j.contains("brackets")) {
    for (const auto& b : j.at("brackets")) {
      // File indices are 1-based with i < j; storage is 0-based.
      const int i = require(b, "i").get<int>();
      const int jj = require(b, "j").get<int>();
      if (i < 1 || jj < 1 || i > dim || jj > dim) {
        throw InputError("bracket indices must lie in [1, dim]");
      }
      if (i >= jj) throw InputError("bracket entries require i < j");
      entries.push_back({i - 1, jj - 1, parse_vector(require(b, "result"), dim, "bracket result")});
    }
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const auto& l : j.at("labels")) labels.push_back(l.get<std::string>());
  }
  return LieAlgebra(dim, entries, std::move(labels));
}

ControlRange parse_omega(const json& j) {
  if (j.contains("radii")) return ControlRange::box(parse_vector(j.at("radii"), -1, "omega radii"));
  if (j.contains("vertices")) {
    std::vector<Vec> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(parse_vector(v, -1, "omega vertex"));
    return ControlRange::polytope(std::move(verts));
  }
  throw InputError("omega needs either \"radii\" or \"vertices\"");
}

GroupFlags parse_flags(const json* j) {
  GroupFlags flags;
  if (!j) return flags;
  if (j->contains("simply_connected")) flags.simply_connected = j->at("simply_connected").get<bool>();
  if (j->contains("finite_semisimple_center")) {
    flags.finite_semisimple_center = j->at("finite_semisimple_center").get<bool>();
  }
  if (j->contains("g0_compact")) {
    const auto& v = j->at("g0_compact");
    if (v.is_boolean()) {
      flags.g0_compact = v.get<bool>();
    } else if (!(v.is_string() && v.get<std::string>() == "auto")) {
      throw InputError("g0_compact must be true, false, or \"auto\"");
    }
  }
  return flags;
}

SimParams parse_sim(const json* j, int dim) {
  SimParams p;
  p.box = Mat(dim, 2);
  for (int i = 0; i < dim; ++i) {
    p.box(i, 0) = -3.0;
    p.box(i, 1) = 3.0;
  }
  p.cells.assign(static_cast<size_t>(dim), 151);
  if (!j) return p;
  if (j->contains("box")) p.box = parse_matrix(j->at("box"), dim, 2, "simulation box");
  if (j->contains("cells_per_axis")) {
    const auto& c = j->at("cells_per_axis");
    if (c.is_number_integer()) {
      p.cells.assign(static_cast<size_t>(dim), c.get<int>());
    } else if (c.is_array() && static_cast<int>(c.size()) == dim) {
      for (int i = 0; i < dim; ++i) p.cells[static_cast<size_t>(i)] = c[static_cast<size_t>(i)].get<int>();
    } else {
      throw InputError("cells_per_axis must be an integer or one per axis");
    }
  }
  if (j->contains("horizon")) p.horizon = j->at("horizon").get<double>();
  if (j->contains("dwell")) p.dwell = j->at("dwell").get<double>();
  if (j->contains("dt")) p.dt = j->at("dt").get<double>();
  if (j->contains("trajectory_dt")) p.trajectory_dt = j->at("trajectory_dt").get<double>();
  if (j->contains("threads")) p.threads = j->at("threads").get<int>();
  if (p.horizon < 0.0 || p.dwell <= 0.0 || p.dt <= 0.0 || p.trajectory_dt <= 0.0 ||
      p.threads < 1) {
    throw InputError("simulation parameters must be positive");
  }
  return p;
}

CheckParams parse_checks(const json* j) {
  CheckParams c;
  if (!j) return c;
  if (j->contains("duality_horizon")) c.duality_horizon = j->at("duality_horizon").get<double>();
  if (j->contains("semigroup_tau1")) c.semigroup_tau1 = j->at("semigroup_tau1").get<double>();
  if (j->contains("semigroup_tau2")) c.semigroup_tau2 = j->at("semigroup_tau2").get<double>();
  if (j->contains("semigroup_cells_per_axis")) {
    const auto& sc = j->at("semigroup_cells_per_axis");
    std::vector<int> cells;
    if (sc.is_number_integer()) {
      cells.assign(1, sc.get<int>());
    } else {
      for (const auto& v : sc) cells.push_back(v.get<int>());
    }
    c.semigroup_cells = cells;
  }
  return c;
}

}  // namespace

SystemConfig parse_system_config(const nlohmann::json& j) {
  LieAlgebra algebra = parse_algebra(require(j, "algebra"));
  const int dim = algebra.dim();

  ValidationReport validation = validate_algebra(algebra, Tolerances{}.alg);
  if (!validation.ok()) {
    throw InputError("algebra violates antisymmetry or Jacobi, residual " +
                     std::to_string(std::max(validation.antisymmetry_residual,
                                             validation.jacobi_residual)));
  }

  Mat drift = parse_matrix(require(j, "drift"), dim, dim, "drift");
  std::vector<Vec> controls;
  for (const auto& c : require(j, "controls")) {
    controls.push_back(parse_vector(c, dim, "control direction"));
  }
  ControlRange omega = parse_omega(require(j, "omega"));
  const json* flags_json = j.contains("flags") ? &j.at("flags") : nullptr;
  const json* sim_json = j.contains("simulation") ? &j.at("simulation") : nullptr;
  const json* checks_json = j.contains("checks") ? &j.at("checks") : nullptr;

  LinearSystemSpec system(std::move(algebra), Derivation{drift}, std::move(controls),
                          std::move(omega), parse_flags(flags_json));
  SimParams sim = parse_sim(sim_json, dim);
  // The semigroup cell list may be given as a single count for all axes.
  CheckParams checks = parse_checks(checks_json);
  if (checks.semigroup_cells && checks.semigroup_cells->size() == 1 && dim > 1) {
    checks.semigroup_cells->assign(static_cast<size_t>(dim), checks.semigroup_cells->front());
  }
  std::string name = j.contains("name") ? j.at("name").get<std::string>() : "system";
  return SystemConfig{std::move(name), std::move(system), std::move(sim), std::move(checks)};
}

SystemConfig load_system_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config parse error in " + path + ": " + e.what());
  }
  try {
    return parse_system_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config structure error in " + path + ": " + e.what());
  }
}

}  // namespace liectrl
