#include "liectrl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "liectrl/log.hpp"

namespace liectrl {

std::size_t GridGeometry::total() const {
  std::size_t n = 1;
  for (int c : cells) n *= static_cast<std::size_t>(c);
  return n;
}

std::optional<std::size_t> GridGeometry::cell_of(const Vec& x) const {
  const int d = dim();
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i) {
    const double xi = x[i];
    if (!std::isfinite(xi)) return std::nullopt;
    const double lo = box(i, 0), hi = box(i, 1);
    if (xi < lo || xi > hi) return std::nullopt;
    long long c = static_cast<long long>(std::floor((xi - lo) / width(i)));
    if (c == cells[i]) c = cells[i] - 1;  // points exactly on the upper face
    if (c < 0 || c >= cells[i]) return std::nullopt;
    idx = idx * static_cast<std::size_t>(cells[i]) + static_cast<std::size_t>(c);
  }
  return idx;
}

void GridGeometry::coords_of(std::size_t idx, std::vector<int>& c) const {
  const int d = dim();
  c.resize(d);
  for (int i = d - 1; i >= 0; --i) {
    c[i] = static_cast<int>(idx % static_cast<std::size_t>(cells[i]));
    idx /= static_cast<std::size_t>(cells[i]);
  }
}

std::size_t GridGeometry::flatten(const std::vector<int>& c) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) {
    idx = idx * static_cast<std::size_t>(cells[i]) + static_cast<std::size_t>(c[i]);
  }
  return idx;
}

Vec GridGeometry::center(std::size_t idx) const {
  const int d = dim();
  Vec x(d);
  for (int i = d - 1; i >= 0; --i) {
    const int c = static_cast<int>(idx % static_cast<std::size_t>(cells[i]));
    idx /= static_cast<std::size_t>(cells[i]);
    x[i] = box(i, 0) + (c + 0.5) * width(i);
  }
  return x;
}

GridGeometry make_grid(const Mat& box, std::vector<int> cells) {
  if (box.cols() != 2 || box.rows() == 0) throw InputError("grid box must be d x 2");
  if (static_cast<int>(cells.size()) != box.rows()) {
    throw InputError("cells per axis must match the box dimension");
  }
  double total = 1.0;
  for (int i = 0; i < box.rows(); ++i) {
    if (!(box(i, 0) < box(i, 1))) throw InputError("grid box must have positive extent");
    if (cells[static_cast<size_t>(i)] < 1) throw InputError("cells per axis must be >= 1");
    total *= cells[static_cast<size_t>(i)];
  }
  if (total > 6.0e7) throw InputError("grid has too many cells");
  return GridGeometry{box, std::move(cells)};
}

const char* to_string(GridKind kind) {
  switch (kind) {
    case GridKind::Reachable: return "reachable";
    case GridKind::Controllable: return "controllable";
    default: return "control_set";
  }
}

OccupancyGrid::OccupancyGrid(GridGeometry geom, GridKind kind, double horizon)
    : geom_(std::move(geom)), kind_(kind), horizon_(horizon), bits_(geom_.total(), 0) {}

bool OccupancyGrid::set(std::size_t idx) {
  if (bits_[idx]) return false;
  bits_[idx] = 1;
  ++count_;
  return true;
}

double OccupancyGrid::fraction_of_box() const {
  return bits_.empty() ? 0.0 : static_cast<double>(count_) / static_cast<double>(bits_.size());
}

std::vector<std::size_t> OccupancyGrid::occupied_cells() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

bool OccupancyGrid::touches_outer_layer() const {
  std::vector<int> c;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (!bits_[i]) continue;
    geom_.coords_of(i, c);
    for (int axis = 0; axis < geom_.dim(); ++axis) {
      if (c[axis] == 0 || c[axis] == geom_.cells[axis] - 1) return true;
    }
  }
  return false;
}

namespace {

struct ExpansionOutput {
  std::vector<std::size_t> landed;
  long long boundary = 0;
};

void validate_grid_inputs(const LinearSystemSpec& s, double horizon,
                          const GridGeometry& geom, const ControlSample& sample,
                          const GridOptions& opts) {
  if (geom.dim() != s.algebra.dim()) {
    throw InputError("grid dimension must match the algebra dimension");
  }
  if (horizon < 0.0) throw InputError("horizon must be nonnegative");
  if (sample.values.empty()) throw InputError("control sample must be nonempty");
  for (const Vec& u : sample.values) {
    if (u.size() != static_cast<int>(s.controls.size())) {
      throw InputError("control sample value has wrong dimension");
    }
  }
  if (sample.dwell <= 0.0) throw InputError("dwell must be positive");
  if (opts.dt <= 0.0) throw InputError("grid dt must be positive");
  const long long steps = std::llround(sample.dwell / opts.dt);
  if (steps < 1 || std::abs(steps * opts.dt - sample.dwell) > 1e-9) {
    throw InputError("dwell must be an integer multiple of dt");
  }
  if (opts.threads < 1) throw InputError("thread count must be positive");
}

/// Seed points of one cell: the center, plus the 2^d corners when enabled.
/// Corners are nudged inward by 1e-9 of a width so that a stationary corner
/// rasterizes back into its own cell instead of leaking into the neighbor.
void cell_seeds(const GridGeometry& geom, std::size_t idx, bool corners,
                std::vector<int>& coords, std::vector<Vec>& seeds) {
  seeds.clear();
  seeds.push_back(geom.center(idx));
  if (!corners) return;
  const int d = geom.dim();
  geom.coords_of(idx, coords);
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec corner(d);
    for (int i = 0; i < d; ++i) {
      const double inward = (mask >> i & 1) ? -1e-9 : 1e-9;
      corner[i] = geom.box(i, 0) +
                  (coords[static_cast<size_t>(i)] + (mask >> i & 1) + inward) * geom.width(i);
    }
    seeds.push_back(corner);
  }
}

/// Expands `frontier` once under every control level: integrates one dwell
/// from each seed point of each cell and reports the landing cells. The work
/// is split over threads; results are merged by the caller, so marking order
/// cannot change the outcome.
void expand_frontier(std::vector<FieldEvaluator>& fields, const GridGeometry& geom,
                     const ControlSample& sample, const std::vector<std::size_t>& frontier,
                     const GridOptions& opts, double direction,
                     std::vector<ExpansionOutput>& outputs) {
  const int nthreads = static_cast<int>(fields.size());
  outputs.assign(nthreads, {});
  auto worker = [&](int tid) {
    FieldEvaluator& field = fields[static_cast<size_t>(tid)];
    ExpansionOutput& out = outputs[static_cast<size_t>(tid)];
    std::vector<int> coords;
    std::vector<Vec> seeds;
    Vec x(geom.dim());
    for (std::size_t w = static_cast<std::size_t>(tid); w < frontier.size();
         w += static_cast<std::size_t>(nthreads)) {
      cell_seeds(geom, frontier[w], opts.corner_seeds, coords, seeds);
      for (const Vec& start : seeds) {
        for (const Vec& u : sample.values) {
          x = start;
          field.advance(x, u, sample.dwell, opts.dt, direction);
          if (auto idx = geom.cell_of(x)) {
            out.landed.push_back(*idx);
          } else {
            ++out.boundary;
          }
        }
      }
    }
  };
  if (nthreads == 1) {
    worker(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
}

OccupancyGrid bfs_grid(const LinearSystemSpec& s, double horizon, const GridGeometry& geom,
                       const ControlSample& sample, const GridOptions& opts,
                       double direction, GridKind kind) {
  validate_grid_inputs(s, horizon, geom, sample, opts);
  OccupancyGrid grid(geom, kind, horizon);
  auto origin = geom.cell_of(Vec::Zero(geom.dim()));
  if (!origin) throw InputError("the grid box must contain the identity");
  grid.set(*origin);

  std::vector<FieldEvaluator> fields;
  const int nthreads = std::max(1, opts.threads);
  fields.reserve(static_cast<size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) fields.emplace_back(s);

  std::vector<std::size_t> frontier{*origin};
  const long long rounds = static_cast<long long>(std::floor(horizon / sample.dwell + 1e-9));
  std::vector<ExpansionOutput> outputs;
  for (long long round = 1; round <= rounds && !frontier.empty(); ++round) {
    expand_frontier(fields, geom, sample, frontier, opts, direction, outputs);
    std::vector<std::size_t> next;
    for (const auto& out : outputs) {
      grid.add_boundary_hits(out.boundary);
      for (std::size_t idx : out.landed) {
        if (grid.set(idx)) next.push_back(idx);
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
    log_debug("bfs " + std::string(to_string(kind)) + " round " + std::to_string(round) +
              ": occupied " + std::to_string(grid.occupied_count()) + ", frontier " +
              std::to_string(frontier.size()));
  }
  return grid;
}

}  // namespace

OccupancyGrid reach_grid(const LinearSystemSpec& s, double horizon, const GridGeometry& geom,
                         const ControlSample& sample, const GridOptions& opts) {
  return bfs_grid(s, horizon, geom, sample, opts, 1.0, GridKind::Reachable);
}

SetComparison compare_grids(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (a.geometry().total() != b.geometry().total()) {
    throw InputError("grid comparison requires a common geometry");
  }
  SetComparison out;
  const std::size_t n = a.geometry().total();
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_a = a.test(i), in_b = b.test(i);
    if (in_a || in_b) ++out.union_count;
    if (in_a != in_b) ++out.symdiff;
  }
  out.ratio = out.union_count == 0
                  ? 0.0
                  : static_cast<double>(out.symdiff) / static_cast<double>(out.union_count);
  return out;
}

ControllableResult controllable_grid(const LinearSystemSpec& s, double horizon,
                                     const GridGeometry& geom, const ControlSample& sample,
                                     const GridOptions& opts, const OccupancyGrid* forward) {
  OccupancyGrid grid = bfs_grid(s, horizon, geom, sample, opts, -1.0, GridKind::Controllable);
  ControllableResult result{std::move(grid), std::nullopt};
  if (!forward) return result;
  if (forward->geometry().total() != geom.total()) {
    throw InputError("duality check requires matching geometries");
  }
  // y lies in the transform of the forward set iff -e^{tD} y is forward
  // reachable; pulling every candidate cell center back rasterizes the
  // transform without holes.
  DualityMetrics m;
  Mat pullback = -flow_matrix(s.drift, horizon);
  const std::size_t n = geom.total();
  for (std::size_t i = 0; i < n; ++i) {
    Vec y = geom.center(i);
    auto src = geom.cell_of(pullback * y);
    if (!src) {
      ++m.excluded;
      continue;
    }
    const bool oracle = forward->test(*src);
    const bool direct = result.grid.test(i);
    ++m.compared;
    if (oracle || direct) ++m.union_count;
    if (oracle != direct) ++m.symdiff;
  }
  m.ratio = m.union_count == 0 ? 0.0
                               : static_cast<double>(m.symdiff) /
                                     static_cast<double>(m.union_count);
  m.confounded = m.excluded > 0 || forward->boundary_hits() > 0;
  result.duality = m;
  return result;
}

OccupancyGrid dilate(const OccupancyGrid& g, int radius) {
  if (radius < 0) throw InputError("dilation radius must be nonnegative");
  const GridGeometry& geom = g.geometry();
  OccupancyGrid out(geom, g.kind(), g.horizon());
  const int d = geom.dim();
  std::vector<int> c(static_cast<size_t>(d)), nb(static_cast<size_t>(d));
  for (std::size_t idx : g.occupied_cells()) {
    geom.coords_of(idx, c);
    // Enumerate the (2r+1)^d neighborhood in mixed radix.
    std::vector<int> offset(static_cast<size_t>(d), -radius);
    while (true) {
      bool ok = true;
      for (int i = 0; i < d && ok; ++i) {
        nb[static_cast<size_t>(i)] = c[static_cast<size_t>(i)] + offset[static_cast<size_t>(i)];
        ok = nb[static_cast<size_t>(i)] >= 0 && nb[static_cast<size_t>(i)] < geom.cells[static_cast<size_t>(i)];
      }
      if (ok) out.set(geom.flatten(nb));
      int axis = d - 1;
      while (axis >= 0 && offset[static_cast<size_t>(axis)] == radius) {
        offset[static_cast<size_t>(axis)] = -radius;
        --axis;
      }
      if (axis < 0) break;
      ++offset[static_cast<size_t>(axis)];
    }
  }
  return out;
}

namespace {

/// True when no occupied cell that meets the given subspace lies in the
/// outermost layer. Cells meet the subspace when the center's orthogonal
/// residual fits inside the half-cell box.
bool restriction_bounded(const OccupancyGrid& g, const Subalgebra& sub) {
  const GridGeometry& geom = g.geometry();
  const int d = geom.dim();
  std::vector<int> c(static_cast<size_t>(d));
  for (std::size_t idx : g.occupied_cells()) {
    Vec x = geom.center(idx);
    Vec residual = sub.dim() == 0 ? x : Vec(x - sub.basis() * (sub.basis().transpose() * x));
    bool meets = true;
    for (int i = 0; i < d && meets; ++i) {
      meets = std::abs(residual[i]) <= 0.5 * geom.width(i) + 1e-12;
    }
    if (!meets) continue;
    geom.coords_of(idx, c);
    for (int i = 0; i < d; ++i) {
      if (c[static_cast<size_t>(i)] == 0 || c[static_cast<size_t>(i)] == geom.cells[static_cast<size_t>(i)] - 1) {
        return false;
      }
    }
  }
  return true;
}

bool grid_connected(const OccupancyGrid& g) {
  const GridGeometry& geom = g.geometry();
  std::vector<std::size_t> occ = g.occupied_cells();
  if (occ.empty()) return false;
  std::vector<std::uint8_t> seen(geom.total(), 0);
  std::vector<std::size_t> stack{occ.front()};
  seen[occ.front()] = 1;
  std::size_t visited = 0;
  const int d = geom.dim();
  std::vector<int> c(static_cast<size_t>(d));
  while (!stack.empty()) {
    std::size_t idx = stack.back();
    stack.pop_back();
    ++visited;
    geom.coords_of(idx, c);
    for (int axis = 0; axis < d; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        const int v = c[static_cast<size_t>(axis)] + dir;
        if (v < 0 || v >= geom.cells[static_cast<size_t>(axis)]) continue;
        std::vector<int> nb = c;
        nb[static_cast<size_t>(axis)] = v;
        std::size_t nidx = geom.flatten(nb);
        if (g.test(nidx) && !seen[nidx]) {
          seen[nidx] = 1;
          stack.push_back(nidx);
        }
      }
    }
  }
  return visited == occ.size();
}

}  // namespace

ControlSetResult control_set_estimate(const LinearSystemSpec& s, double horizon,
                                      const GridGeometry& geom, const ControlSample& sample,
                                      const GridOptions& opts,
                                      const SpectralDecomposition* dec) {
  OccupancyGrid reach = reach_grid(s, horizon, geom, sample, opts);
  ControllableResult ctr = controllable_grid(s, horizon, geom, sample, opts, &reach);
  OccupancyGrid closure = dilate(reach, 1);
  OccupancyGrid estimate(geom, GridKind::ControlSet, horizon);
  const std::size_t n = geom.total();
  for (std::size_t i = 0; i < n; ++i) {
    if (closure.test(i) && ctr.grid.test(i)) estimate.set(i);
  }

  ControlSetResult out{std::move(reach),    std::move(ctr.grid), std::move(estimate),
                       ctr.duality.value(), false,               false,
                       false,               false,               false,
                       false,               std::nullopt,        std::nullopt};
  out.contains_origin = out.estimate.test(*geom.cell_of(Vec::Zero(geom.dim())));
  out.bounded_in_box = out.estimate.occupied_count() > 0 && !out.estimate.touches_outer_layer();
  out.connected = grid_connected(out.estimate);
  out.open_like = compare_grids(out.estimate, out.controllable).ratio < 0.10;
  out.closed_like = compare_grids(out.estimate, closure).ratio < 0.10;
  out.saturating = out.estimate.fraction_of_box() >= 0.99;
  if (dec) {
    out.reach_in_gminus_bounded = restriction_bounded(out.reach, dec->g_minus);
    out.controllable_in_gplus_bounded = restriction_bounded(out.controllable, dec->g_plus);
  }
  return out;
}

SemigroupCheck semigroup_check(const LinearSystemSpec& s, double tau1, double tau2,
                               const GridGeometry& geom, const ControlSample& sample,
                               const GridOptions& opts) {
  if (tau1 < 0.0 || tau2 < 0.0) throw InputError("semigroup horizons must be nonnegative");
  OccupancyGrid a1 = reach_grid(s, tau1, geom, sample, opts);
  OccupancyGrid a2 = reach_grid(s, tau2, geom, sample, opts);
  OccupancyGrid a12 = reach_grid(s, tau1 + tau2, geom, sample, opts);

  // Product set: every pair x * phi_{tau1}(y) with x from A_{tau1}, y from A_{tau2}.
  OccupancyGrid product(geom, GridKind::Reachable, tau1 + tau2);
  const Mat push = flow_matrix(s.drift, tau1);
  std::vector<std::size_t> occ1 = a1.occupied_cells();
  std::vector<std::size_t> occ2 = a2.occupied_cells();
  std::vector<Vec> shifted;
  shifted.reserve(occ2.size());
  for (std::size_t idx : occ2) shifted.push_back(push * geom.center(idx));

  const int nthreads = std::max(1, opts.threads);
  std::vector<std::vector<std::size_t>> landed(static_cast<size_t>(nthreads));
  auto worker = [&](int tid) {
    BchEvaluator bch(s.algebra, s.tol.rank);
    Vec z(s.algebra.dim());
    auto& out = landed[static_cast<size_t>(tid)];
    for (std::size_t w = static_cast<std::size_t>(tid); w < occ1.size();
         w += static_cast<std::size_t>(nthreads)) {
      const Vec x = geom.center(occ1[w]);
      for (const Vec& y : shifted) {
        bch.product_into(x, y, z);
        if (auto idx = geom.cell_of(z)) out.push_back(*idx);
      }
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& chunk : landed) {
    for (std::size_t idx : chunk) product.set(idx);
  }

  SetComparison cmp = compare_grids(product, a12);
  return SemigroupCheck{cmp.ratio, cmp.symdiff, cmp.union_count};
}

}  // namespace liectrl
