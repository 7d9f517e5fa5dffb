#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liectrl/algebra.hpp"
#include "liectrl/spectral.hpp"

namespace liectrl {

/// Admissible control value set: a coordinate box or a vertex-listed polytope.
/// Either way it must contain 0 in its interior.
class ControlRange {
 public:
  static ControlRange box(const Vec& radii);
  static ControlRange polytope(std::vector<Vec> vertices);

  int dim() const { return dim_; }
  bool is_box() const { return is_box_; }
  const Vec& radii() const { return radii_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  /// Positive distance from 0 to the boundary (sampled support check for polytopes).
  double interior_margin() const { return margin_; }

 private:
  ControlRange() = default;
  int dim_ = 0;
  bool is_box_ = true;
  Vec radii_;
  std::vector<Vec> vertices_;
  double margin_ = 0.0;
};

/// Group-level assumptions that cannot be recovered from the algebra alone.
struct GroupFlags {
  bool simply_connected = true;
  bool finite_semisimple_center = true;
  /// Compactness of the central subgroup for the zero-real-part spectrum.
  /// nullopt means "auto": resolved to (dim g_zero == 0) for simply
  /// connected nilpotent groups, otherwise left undetermined.
  std::optional<bool> g0_compact;
};

/// Drift derivation plus right-invariant control directions on the group
/// determined by the algebra and flags.
struct LinearSystemSpec {
  LinearSystemSpec(LieAlgebra algebra_in, Derivation drift_in, std::vector<Vec> controls_in,
                   ControlRange omega_in, GroupFlags flags_in = {},
                   Tolerances tol_in = {});

  LieAlgebra algebra;
  Derivation drift;
  std::vector<Vec> controls;
  ControlRange omega;
  GroupFlags flags;
  Tolerances tol;

  // Derived on construction.
  bool nilpotent = false;
  bool solvable = false;
  std::optional<int> nil_class;
};

/// Rank condition: the bracket-closed drift-invariant span of the control
/// directions is the whole algebra.
bool check_larc(const LinearSystemSpec& s);

enum class Verdict { Yes, No, Unknown };

std::string to_string(Verdict v);

/// One classification outcome with its rule id, the statement of the result
/// it instantiates, and the hypotheses consumed.
struct Finding {
  Verdict value = Verdict::Unknown;
  std::string rule;
  std::string statement;
  std::vector<std::string> hypotheses;
  std::string note;
};

/// Numerical compactness observations used by the boundedness rule.
struct NumericEvidence {
  bool reach_in_gminus_bounded = false;
  bool controllable_in_gplus_bounded = false;
};

struct ClassificationReport {
  bool larc = false;
  bool a_open_assumed = false;
  bool nilpotent = false;
  bool solvable = false;
  std::optional<bool> g0_compact;
  int dim_plus = 0, dim_zero = 0, dim_minus = 0;
  bool hyperbolic = false;

  Finding c_exists;       // R1
  Finding c_closed;       // R2
  Finding c_open;         // R3
  Finding c_equals_group; // R4
  Finding controllable;   // R5
  Finding c_bounded;      // R6
  Finding c_unique;       // R7
  Finding a_equals_group;     // R8 support
  Finding astar_equals_group; // R8 support
  std::vector<std::string> equivalences;  // R8 statements used for cross checks
};

/// Applies the classification rule table to the spectral data and flags.
/// Never guesses: a verdict is Yes/No only when the hypotheses of the rule
/// hold, and the consumed hypotheses are recorded on the finding.
ClassificationReport classify(const LinearSystemSpec& s, const SpectralDecomposition& dec,
                              const std::optional<NumericEvidence>& evidence = {});

struct IdentityReport {
  bool applicable = false;
  // dim(g_plus_zero) + dim(g_minus) == d and dim(g_minus_zero) + dim(g_plus) == d,
  // with the pair spanning the whole algebra.
  bool plus_zero_minus_ok = false;
  bool minus_zero_plus_ok = false;
  bool ok() const { return plus_zero_minus_ok && minus_zero_plus_ok; }
};

/// Vector-space form of the global decomposition identities. Applicable when
/// the group is solvable or the central part is compact.
IdentityReport decomposition_identities(const LinearSystemSpec& s,
                                        const SpectralDecomposition& dec);

}  // namespace liectrl
