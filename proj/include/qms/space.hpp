#pragma once

// Finite quasi-metric spaces: a point set with an asymmetric distance matrix
// (row = source, column = target), optionally carrying point weights.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qms/matrix.hpp"

namespace qms {

using Index = std::size_t;
using IndexSet = std::vector<Index>;

/// Finite point set with an asymmetric distance matrix.
///
/// Construction checks only the structural requirements (square, finite).
/// The quasi-metric axioms are checked by validate().
class QuasiMetricSpace {
 public:
  QuasiMetricSpace() = default;
  explicit QuasiMetricSpace(Matrix dist, std::vector<std::string> labels = {},
                            std::vector<std::vector<double>> coords = {});

  [[nodiscard]] std::size_t size() const noexcept { return dist_.rows(); }
  double operator()(Index from, Index to) const noexcept { return dist_(from, to); }

  [[nodiscard]] const Matrix& dist() const noexcept { return dist_; }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::vector<std::vector<double>>& coords() const noexcept { return coords_; }
  [[nodiscard]] bool has_coords() const noexcept { return !coords_.empty(); }

  /// Subspace on the given points, in the given order.
  [[nodiscard]] QuasiMetricSpace restrict_to(std::span<const Index> points) const;
  /// Same points with relabelled order: result point i is this point perm[i].
  [[nodiscard]] QuasiMetricSpace permuted(std::span<const Index> perm) const;

 private:
  Matrix dist_;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> coords_;
};

/// A quasi-metric space with a nonnegative weight per atom and an optional basepoint.
struct MeasuredSpace {
  QuasiMetricSpace space;
  std::vector<double> weights;
  std::optional<Index> basepoint;

  MeasuredSpace() = default;
  MeasuredSpace(QuasiMetricSpace s, std::vector<double> w, std::optional<Index> star = std::nullopt);

  [[nodiscard]] std::size_t size() const noexcept { return space.size(); }
  [[nodiscard]] double total_mass() const noexcept;
  [[nodiscard]] MeasuredSpace normalized() const;
  /// Indices of atoms with positive weight.
  [[nodiscard]] IndexSet support() const;
};

/// Nondecreasing right-continuous step bound on reversibility of forward balls:
/// theta(r) is the value at the smallest breakpoint radius >= r, the last value beyond.
class ThetaBound {
 public:
  ThetaBound() = default;
  explicit ThetaBound(std::vector<std::pair<double, double>> breakpoints);

  /// Breakpoints f(r_k) at the given radii; an upper bound for nondecreasing f on [0, r_max].
  template <class F>
  static ThetaBound sampled(F&& f, std::span<const double> radii) {
    std::vector<std::pair<double, double>> bp;
    bp.reserve(radii.size());
    for (double r : radii) bp.emplace_back(r, f(r));
    return ThetaBound(std::move(bp));
  }

  double operator()(double r) const;
  [[nodiscard]] const std::vector<std::pair<double, double>>& breakpoints() const noexcept { return bp_; }

 private:
  std::vector<std::pair<double, double>> bp_;
};

enum class Orientation { forward, backward };

struct BallSpec {
  Index center = 0;
  double radius = 0.0;
  Orientation orientation = Orientation::forward;
  bool closed = false;
};

// ---------------------------------------------------------------------------
// validation

inline constexpr double kModelTolerance = 1e-9;
inline constexpr double kUserTolerance = 1e-6;

struct TriangleViolation {
  Index i, j, k;
  double excess;  // d(i,k) - d(i,j) - d(j,k)
};

struct ValidationReport {
  bool valid = true;
  std::vector<TriangleViolation> triangle;
  std::vector<std::pair<Index, Index>> zero_off_diagonal;
  std::vector<std::pair<Index, Index>> negative;
  std::vector<Index> nonzero_diagonal;
  std::size_t triangle_count = 0;  // total, may exceed triangle.size()
  bool truncated = false;
};

/// Checks the quasi-metric axioms. At most `max_listed` triangle violations are stored.
ValidationReport validate(const QuasiMetricSpace& space, double tol = kUserTolerance,
                          std::size_t max_listed = 10000);

// ---------------------------------------------------------------------------
// scalar statistics

/// max over ordered pairs x != y of d(x,y)/d(y,x) inside the subset; 1 for a singleton.
double reversibility(const QuasiMetricSpace& space, std::span<const Index> subset);
double reversibility(const QuasiMetricSpace& space);

QuasiMetricSpace symmetrize(const QuasiMetricSpace& space);

IndexSet ball(const QuasiMetricSpace& space, const BallSpec& spec);

double diameter(const QuasiMetricSpace& space);
double diameter(const QuasiMetricSpace& space, std::span<const Index> subset);

double path_length(const QuasiMetricSpace& space, std::span<const Index> path);

/// All-pairs shortest directed chains using only hops with d(u,v) < neighbor_radius.
/// Throws ComputationError naming an unreachable pair if the hop graph is not strongly connected.
QuasiMetricSpace induced_length_metric(const QuasiMetricSpace& space, double neighbor_radius);

struct MidpointDefect {
  double defect;
  Index midpoint;
};

MidpointDefect midpoint_defect(const QuasiMetricSpace& space, Index x, Index y);

// ---------------------------------------------------------------------------
// covering statistics

/// Certified bracket for an integer-valued extremal count.
struct CountBounds {
  std::size_t lower = 0;
  std::size_t upper = 0;
  bool exact = false;
  [[nodiscard]] std::size_t value() const noexcept { return exact ? lower : upper; }
};

inline constexpr std::size_t kExactCoverLimit = 12;

/// Minimum number of open forward eps-balls centred in the space that cover it.
CountBounds covering_number(const QuasiMetricSpace& space, double eps);
/// Maximum number of pairwise disjoint open forward (eps/2)-balls.
CountBounds capacity(const QuasiMetricSpace& space, double eps);

struct CoveringSandwich {
  double eps, theta;
  CountBounds cap_2eps, cov_eps, cap_eps_over_theta, cap_2theta_eps;
  /// Cap(2 eps) <= Cov(eps); holds for reversible spaces, can fail otherwise.
  bool reversible_form_holds;
  /// Cap(2 theta eps) <= Cov(eps) <= Cap(eps / theta).
  bool theta_form_holds;
};

/// Evaluates both covering sandwiches with theta = reversibility of the space.
/// Only meaningful when all four counts are exact.
CoveringSandwich covering_sandwich(const QuasiMetricSpace& space, double eps);

struct DoublingResult {
  double value = 1.0;  // +inf when some denominator ball has zero mass
  Index witness_point = 0;
  double witness_radius = 0.0;
  bool infinite = false;
};

/// sup over points x and radii r of nu[closed B+_x(2r)] / nu[closed B+_x(r)].
DoublingResult doubling_constant(const MeasuredSpace& mspace, std::span<const double> radii);

}  // namespace qms
