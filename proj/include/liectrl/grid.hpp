#pragma once

#include <cstdint>
#include <optional>

#include "liectrl/simulation.hpp"

namespace liectrl {

/// Axis-aligned box partitioned into equal cells, row-major with axis 0
/// slowest, so ascending flat indices enumerate cells lexicographically.
struct GridGeometry {
  Mat box;                 // d x 2, column 0 = lower, column 1 = upper
  std::vector<int> cells;  // cells per axis

  int dim() const { return static_cast<int>(cells.size()); }
  double width(int axis) const { return (box(axis, 1) - box(axis, 0)) / cells[axis]; }
  std::size_t total() const;
  /// Flat index of the cell containing x; nullopt outside the box or non-finite.
  std::optional<std::size_t> cell_of(const Vec& x) const;
  void coords_of(std::size_t idx, std::vector<int>& c) const;
  std::size_t flatten(const std::vector<int>& c) const;
  Vec center(std::size_t idx) const;
};

GridGeometry make_grid(const Mat& box, std::vector<int> cells);

enum class GridKind { Reachable, Controllable, ControlSet };

const char* to_string(GridKind kind);

/// Occupancy bitmap over a grid, tagged with what it approximates.
class OccupancyGrid {
 public:
  OccupancyGrid(GridGeometry geom, GridKind kind, double horizon);

  const GridGeometry& geometry() const { return geom_; }
  GridKind kind() const { return kind_; }
  double horizon() const { return horizon_; }
  bool test(std::size_t idx) const { return bits_[idx] != 0; }
  /// Marks a cell; returns true when newly marked. Not thread safe.
  bool set(std::size_t idx);
  std::size_t occupied_count() const { return count_; }
  double fraction_of_box() const;
  /// Ascending (lexicographic) list of occupied flat indices.
  std::vector<std::size_t> occupied_cells() const;
  /// Whether any occupied cell lies in the outermost cell layer.
  bool touches_outer_layer() const;
  long long boundary_hits() const { return boundary_hits_; }
  void add_boundary_hits(long long n) { boundary_hits_ += n; }

 private:
  GridGeometry geom_;
  GridKind kind_;
  double horizon_;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
  long long boundary_hits_ = 0;
};

struct GridOptions {
  double dt = 1e-2;
  int threads = 1;
  /// Expand each cell from its corners as well as its center. Center-only
  /// expansion stalls against attracting boundaries (the step shrinks below
  /// half a cell); a corner sits on the face, so any outward step crosses.
  bool corner_seeds = true;
};

/// Dwell-quantized breadth-first approximation of the reachable set of the
/// identity up to the horizon. Each cell is expanded once, from its seed
/// points; trajectories leaving the box count as boundary hits and are
/// dropped.
OccupancyGrid reach_grid(const LinearSystemSpec& s, double horizon,
                         const GridGeometry& geom, const ControlSample& sample,
                         const GridOptions& opts = {});

struct SetComparison {
  std::size_t symdiff = 0;
  std::size_t union_count = 0;
  double ratio = 0.0;  // symdiff / union, 0 when both empty
};

SetComparison compare_grids(const OccupancyGrid& a, const OccupancyGrid& b);

/// Agreement between the reversed-time grid and the flow transform of the
/// forward grid. Cells whose pullback leaves the box are excluded; a truncated
/// forward grid marks the comparison as confounded.
struct DualityMetrics {
  double ratio = 0.0;
  std::size_t compared = 0;
  std::size_t excluded = 0;
  std::size_t symdiff = 0;
  std::size_t union_count = 0;
  bool confounded = false;
};

struct ControllableResult {
  OccupancyGrid grid;
  std::optional<DualityMetrics> duality;
};

/// Reversed-time BFS approximation of the set steerable to the identity.
/// When a forward grid at the same horizon and geometry is supplied, the
/// inverse-and-flow transform of it is rasterized as an independent oracle
/// and compared cell by cell.
ControllableResult controllable_grid(const LinearSystemSpec& s, double horizon,
                                     const GridGeometry& geom, const ControlSample& sample,
                                     const GridOptions& opts = {},
                                     const OccupancyGrid* forward = nullptr);

/// Chebyshev dilation by `radius` cells.
OccupancyGrid dilate(const OccupancyGrid& g, int radius);

struct ControlSetResult {
  OccupancyGrid reach;
  OccupancyGrid controllable;
  OccupancyGrid estimate;  // (reach dilated by one cell) ∩ controllable
  DualityMetrics duality;
  bool contains_origin = false;
  bool bounded_in_box = false;  // estimate avoids the outermost cell layer
  bool connected = false;       // face connectivity of the estimate
  // Shape flags for the theory cross-check.
  bool open_like = false;    // estimate ≈ controllable grid
  bool closed_like = false;  // estimate ≈ dilated reach grid
  bool saturating = false;   // estimate covers (almost) the whole box
  std::optional<bool> reach_in_gminus_bounded;
  std::optional<bool> controllable_in_gplus_bounded;
};

/// Control set estimate around the identity: closure of the reachable set
/// (approximated by one-cell dilation) intersected with the controllable set.
ControlSetResult control_set_estimate(const LinearSystemSpec& s, double horizon,
                                      const GridGeometry& geom, const ControlSample& sample,
                                      const GridOptions& opts = {},
                                      const SpectralDecomposition* dec = nullptr);

struct SemigroupCheck {
  double ratio = 0.0;
  std::size_t symdiff = 0;
  std::size_t union_count = 0;
};

/// Compares reach(tau1+tau2) against the product reach(tau1) * flow_{tau1}(reach(tau2))
/// composed cellwise with the BCH product.
SemigroupCheck semigroup_check(const LinearSystemSpec& s, double tau1, double tau2,
                               const GridGeometry& geom, const ControlSample& sample,
                               const GridOptions& opts = {});

}  // namespace liectrl
