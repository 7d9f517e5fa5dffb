#include "liectrl/io.hpp"

#include <cstdio>

namespace liectrl {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finding_to_json(const Finding& f) {
  json j;
  j["value"] = to_string(f.value);
  j["rule"] = f.rule;
  j["statement"] = f.statement;
  j["hypotheses"] = f.hypotheses;
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

json basis_to_json(const Subalgebra& s) {
  json rows = json::array();
  for (int c = 0; c < s.dim(); ++c) {
    json row = json::array();
    for (int r = 0; r < s.ambient_dim(); ++r) row.push_back(s.basis()(r, c));
    rows.push_back(row);
  }
  return rows;
}

std::string verdict_mark(bool agree) { return agree ? "AGREE" : "DISAGREE"; }

void add_check(CrossCheck& out, const char* name, Verdict theory, bool numeric) {
  if (theory == Verdict::Unknown) return;
  const bool agree = (theory == Verdict::Yes) == numeric;
  out.lines.push_back(verdict_mark(agree) + std::string(" ") + name +
                      ": theory=" + to_string(theory) + " numeric=" + (numeric ? "yes" : "no"));
  out.all_agree = out.all_agree && agree;
}

}  // namespace

json validation_to_json(const ValidationReport& v) {
  return json{{"antisymmetry_ok", v.antisymmetry_ok},
              {"antisymmetry_residual", v.antisymmetry_residual},
              {"jacobi_ok", v.jacobi_ok},
              {"jacobi_residual", v.jacobi_residual}};
}

json spectral_to_json(const SpectralDecomposition& dec) {
  json eig = json::array();
  for (const auto& c : dec.eigenvalues) {
    eig.push_back(json{{"re", c.value.real()}, {"im", c.value.imag()},
                       {"multiplicity", c.multiplicity}});
  }
  json j;
  j["eigenvalues"] = eig;
  j["hyperbolic"] = dec.hyperbolic;
  j["dim_plus"] = dec.g_plus.dim();
  j["dim_zero"] = dec.g_zero.dim();
  j["dim_minus"] = dec.g_minus.dim();
  j["g_plus"] = basis_to_json(dec.g_plus);
  j["g_zero"] = basis_to_json(dec.g_zero);
  j["g_minus"] = basis_to_json(dec.g_minus);
  j["g_plus_zero"] = basis_to_json(dec.g_plus_zero);
  j["g_minus_zero"] = basis_to_json(dec.g_minus_zero);
  return j;
}

json grading_to_json(const GradingReport& g) {
  json entries = json::array();
  for (const auto& e : g.entries) {
    entries.push_back(json{{"alpha_re", e.alpha.real()},
                           {"alpha_im", e.alpha.imag()},
                           {"beta_re", e.beta.real()},
                           {"beta_im", e.beta.imag()},
                           {"target_exists", e.target_exists},
                           {"residual", e.residual}});
  }
  return json{{"pass", g.pass}, {"worst_residual", g.worst_residual}, {"entries", entries}};
}

json classification_to_json(const ClassificationReport& r) {
  json j;
  j["larc"] = r.larc;
  j["a_open_assumed"] = r.a_open_assumed;
  j["nilpotent"] = r.nilpotent;
  j["solvable"] = r.solvable;
  if (r.g0_compact) j["g0_compact"] = *r.g0_compact;
  j["dim_plus"] = r.dim_plus;
  j["dim_zero"] = r.dim_zero;
  j["dim_minus"] = r.dim_minus;
  j["hyperbolic"] = r.hyperbolic;
  j["verdicts"] = json{{"c_exists", finding_to_json(r.c_exists)},
                       {"c_closed", finding_to_json(r.c_closed)},
                       {"c_open", finding_to_json(r.c_open)},
                       {"c_equals_group", finding_to_json(r.c_equals_group)},
                       {"controllable", finding_to_json(r.controllable)},
                       {"c_bounded", finding_to_json(r.c_bounded)},
                       {"c_unique", finding_to_json(r.c_unique)},
                       {"a_equals_group", finding_to_json(r.a_equals_group)},
                       {"astar_equals_group", finding_to_json(r.astar_equals_group)}};
  j["equivalences"] = r.equivalences;
  return j;
}

json identities_to_json(const IdentityReport& r) {
  return json{{"applicable", r.applicable},
              {"plus_zero_minus_ok", r.plus_zero_minus_ok},
              {"minus_zero_plus_ok", r.minus_zero_plus_ok}};
}

std::string classification_to_text(const ClassificationReport& r) {
  std::string out;
  out += "rank condition: " + std::string(r.larc ? "holds" : "fails") + "\n";
  out += "reachable set assumed open: " + std::string(r.a_open_assumed ? "yes" : "no") + "\n";
  out += "group: ";
  out += r.nilpotent ? "nilpotent" : (r.solvable ? "solvable" : "general");
  if (r.g0_compact) out += *r.g0_compact ? ", central part compact" : ", central part noncompact";
  out += "\n";
  out += "spectrum split: dim g+ = " + std::to_string(r.dim_plus) +
         ", dim g0 = " + std::to_string(r.dim_zero) +
         ", dim g- = " + std::to_string(r.dim_minus) +
         (r.hyperbolic ? " (hyperbolic)\n" : "\n");
  auto line = [&out](const char* label, const Finding& f) {
    out += std::string(f.rule) + " " + label + ": " + to_string(f.value);
    if (!f.note.empty()) out += " (" + f.note + ")";
    out += "\n";
  };
  line("control set exists", r.c_exists);
  line("control set closed", r.c_closed);
  line("control set open", r.c_open);
  line("control set is whole group", r.c_equals_group);
  line("controllable", r.controllable);
  line("control set bounded", r.c_bounded);
  line("control set unique", r.c_unique);
  line("reachable set is whole group", r.a_equals_group);
  line("controllable set is whole group", r.astar_equals_group);
  return out;
}

json duality_to_json(const DualityMetrics& m) {
  return json{{"ratio", m.ratio},         {"compared", m.compared},
              {"excluded", m.excluded},   {"symdiff", m.symdiff},
              {"union", m.union_count},   {"confounded", m.confounded}};
}

json grid_summary_json(const OccupancyGrid& g) {
  return json{{"kind", to_string(g.kind())},
              {"horizon", g.horizon()},
              {"occupied", g.occupied_count()},
              {"fraction_of_box", g.fraction_of_box()},
              {"boundary_hits", g.boundary_hits()},
              {"touches_outer_layer", g.touches_outer_layer()}};
}

json controlset_to_json(const ControlSetResult& r) {
  json j;
  j["reach"] = grid_summary_json(r.reach);
  j["controllable"] = grid_summary_json(r.controllable);
  j["estimate"] = grid_summary_json(r.estimate);
  j["duality"] = duality_to_json(r.duality);
  j["contains_origin"] = r.contains_origin;
  j["bounded_in_box"] = r.bounded_in_box;
  j["connected"] = r.connected;
  j["open_like"] = r.open_like;
  j["closed_like"] = r.closed_like;
  j["saturating"] = r.saturating;
  if (r.reach_in_gminus_bounded) j["reach_in_gminus_bounded"] = *r.reach_in_gminus_bounded;
  if (r.controllable_in_gplus_bounded) {
    j["controllable_in_gplus_bounded"] = *r.controllable_in_gplus_bounded;
  }
  return j;
}

CrossCheck cross_check_reach(const ClassificationReport& report, const OccupancyGrid& reach) {
  CrossCheck out;
  add_check(out, "reachable set fills the group", report.a_equals_group.value,
            reach.fraction_of_box() >= 0.99);
  return out;
}

CrossCheck cross_check_controlset(const ClassificationReport& report,
                                  const ControlSetResult& result) {
  CrossCheck out;
  add_check(out, "control set open", report.c_open.value, result.open_like);
  add_check(out, "control set closed", report.c_closed.value, result.closed_like);
  add_check(out, "control set fills the group", report.c_equals_group.value,
            result.saturating);
  add_check(out, "control set bounded", report.c_bounded.value, result.bounded_in_box);
  return out;
}

std::string grid_to_csv(const OccupancyGrid& g) {
  const GridGeometry& geom = g.geometry();
  const int d = geom.dim();
  std::string out;
  out += "kind," + std::string(to_string(g.kind())) + "\n";
  out += "horizon," + fmt(g.horizon()) + "\n";
  out += "dim," + std::to_string(d) + "\n";
  out += "occupied," + std::to_string(g.occupied_count()) + "\n";
  out += "boundary_hits," + std::to_string(g.boundary_hits()) + "\n";
  out += "axis,lo,hi,cells\n";
  for (int i = 0; i < d; ++i) {
    out += std::to_string(i) + "," + fmt(geom.box(i, 0)) + "," + fmt(geom.box(i, 1)) + "," +
           std::to_string(geom.cells[static_cast<size_t>(i)]) + "\n";
  }
  for (int i = 0; i < d; ++i) {
    out += (i ? ",i" : "i") + std::to_string(i);
  }
  out += "\n";
  std::vector<int> c;
  for (std::size_t idx : g.occupied_cells()) {
    geom.coords_of(idx, c);
    for (int i = 0; i < d; ++i) {
      if (i) out += ',';
      out += std::to_string(c[static_cast<size_t>(i)]);
    }
    out += "\n";
  }
  return out;
}

std::string trajectory_to_csv(const Trajectory& t) {
  std::string out = "t";
  const int d = t.x.empty() ? 0 : static_cast<int>(t.x.front().size());
  for (int i = 1; i <= d; ++i) out += ",x_" + std::to_string(i);
  out += "\n";
  for (size_t k = 0; k < t.t.size(); ++k) {
    out += fmt(t.t[k]);
    for (int i = 0; i < d; ++i) out += "," + fmt(t.x[k][i]);
    out += "\n";
  }
  return out;
}

}  // namespace liectrl
