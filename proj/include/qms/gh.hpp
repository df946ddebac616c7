#pragma once

// Distances between finite spaces and measures: forward Hausdorff, Prokhorov,
// epsilon-isometry defects and the theta-Gromov-Hausdorff(-Prokhorov) bracket.

#include <cstdint>
#include <span>
#include <vector>

#include "qms/space.hpp"

namespace qms::gh {

/// Assignment of every source point to a target point.
struct PointMap {
  std::vector<Index> assignment;
  [[nodiscard]] std::size_t size() const noexcept { return assignment.size(); }
  Index operator()(Index x) const { return assignment[x]; }
};

/// sup over ordered pairs |d_Y(f x, f x') - d_X(x, x')|.
double distortion(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const PointMap& f);

/// max over y of min over x of d_Y(f x, y): the smallest eps with Y in the closure of f(X)^eps.
double covering_defect(const QuasiMetricSpace& y, const PointMap& f);

/// max(distortion, covering defect): f is an eps-isometry exactly for eps >= this value.
double isometry_defect(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const PointMap& f);

struct HausdorffResult {
  double value;
  double a_into_b;  // max_a min_b d(b, a): A inside B^eps
  double b_into_a;  // max_b min_a d(a, b): B inside A^eps
};

/// Forward Hausdorff distance inf{eps : A in B^eps, B in A^eps} with A^eps = {x : d(A, x) < eps}.
HausdorffResult hausdorff(const QuasiMetricSpace& space, std::span<const Index> a, std::span<const Index> b);

struct IsoDefectOptions {
  std::uint64_t exhaustive_limit = 1'000'000;  // |Y|^|X| at or below this: exact search
  std::size_t restarts = 32;
  std::size_t iterations_per_point = 200;
  std::uint64_t seed = 0;
  bool force_local_search = false;
};

struct IsoDefect {
  double value;
  PointMap map;
  bool heuristic;
};

/// Minimal eps such that some map X -> Y is an eps-isometry.
IsoDefect iso_defect(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const IsoDefectOptions& opts = {});

struct GhBracket {
  double lower;
  double upper;
  double theta;
  PointMap witness_map;
  bool witness_from_x;  // witness maps X -> Y when true, Y -> X otherwise
  bool heuristic;
};

/// Bracket [m/(1+theta), 2m] around the theta-Gromov-Hausdorff distance with
/// m = min(iso_defect(X->Y), iso_defect(Y->X)). Requires theta >= both reversibilities.
GhBracket gh_bracket(const QuasiMetricSpace& x, const QuasiMetricSpace& y, double theta,
                     const IsoDefectOptions& opts = {});

/// Prokhorov distance between two finite measures on one space (forward open fattening).
double prokhorov(const QuasiMetricSpace& space, std::span<const double> mu, std::span<const double> nu);

/// The disjoint union X + Y with the gluing metric built from an eps-isometry f: X -> Y
/// (X occupies indices [0, |X|), Y the rest).
QuasiMetricSpace glue(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const PointMap& f, double eps);

struct GhpResult {
  double upper;
  double hausdorff;
  double prokhorov;
  double map_defect;
  double glued_reversibility;
  PointMap map;
  bool heuristic;
};

/// Upper bound on the theta-GHP distance: Hausdorff + Prokhorov parts on the explicit gluing
/// built from the best iso_defect map X -> Y.
GhpResult ghp_upper(const MeasuredSpace& x, const MeasuredSpace& y, double theta, const IsoDefectOptions& opts = {});

}  // namespace qms::gh
