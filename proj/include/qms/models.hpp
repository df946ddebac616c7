#pragma once

// Closed-form Finsler model quasi-metrics and samplers that turn them into
// finite measured spaces.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qms/space.hpp"

namespace qms::models {

using Point = std::vector<double>;

/// Funk metric on the open Euclidean unit ball.
struct FunkBall {
  int dim = 2;
};

/// Flat torus (period 2*pi per axis) with Randers norm |y| + b*y^1, 0 <= b < 1.
struct RandersTorus {
  int dim = 2;
  double b = 0.0;
};

/// Funk metric on the unit ball plus the exact one-form <a,y>/(1+<a,x>), |a| < 1.
struct RandersBall {
  std::vector<double> drift;
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(drift.size()); }
};

/// Euclidean cube [0, side]^dim.
struct EuclideanBox {
  int dim = 1;
  double side = 1.0;
};

using Model = std::variant<FunkBall, RandersTorus, RandersBall, EuclideanBox>;

[[nodiscard]] std::string model_name(const Model& model);
[[nodiscard]] int model_dim(const Model& model);
/// Checks model parameters; throws DomainError.
void check_model(const Model& model);

// --- Funk -------------------------------------------------------------------

/// Funk norm F(x, y) of tangent vector y at x, |x| < 1.
double funk_norm(std::span<const double> x, std::span<const double> y);

/// Funk distance d_F(x1, x2) = ln(|x1 - a| / |x2 - a|), a the exit point of the ray x1 -> x2.
double funk_distance(std::span<const double> x1, std::span<const double> x2);

/// Sharp reversibility of the closed forward Funk ball of radius r about the origin: 2e^r - 1.
double funk_ball_reversibility(double r);

/// Euclidean radius of the closed forward Funk ball of radius r about the origin: 1 - e^{-r}.
double funk_ball_euclidean_radius(double r);

// --- Randers torus ------------------------------------------------------------

/// min over lattice translates v of |q - p + v| + b (q - p + v)^1.
double randers_torus_distance(const RandersTorus& model, std::span<const double> p, std::span<const double> q);

/// (1 + b) / (1 - b).
double randers_torus_reversibility(const RandersTorus& model);

// --- Randers ball ---------------------------------------------------------------

double randers_ball_norm(const RandersBall& model, std::span<const double> x, std::span<const double> y);

/// Integral of the Randers norm along the straight chord p -> q (adaptive quadrature).
double randers_ball_distance(const RandersBall& model, std::span<const double> p, std::span<const double> q,
                             double abs_tol = 1e-10);

/// Theta(r) bounding reversibility of closed forward balls about the origin, valid for |a| <= 1/2.
double randers_ball_theta(double r);

/// The drift e / (i^2 + 1) of the i-th member of the converging Randers family.
RandersBall randers_ball_member(int dim, int i);

// --- dispatch -------------------------------------------------------------------

double distance(const Model& model, std::span<const double> p, std::span<const double> q);

// --- sampling ---------------------------------------------------------------------

enum class SampleStrategy { grid, radial_shells, seeded_uniform };
enum class WeightModel { lebesgue, uniform };

struct SampleSpec {
  SampleStrategy strategy = SampleStrategy::grid;
  double pitch = 0.1;          // grid
  std::size_t shells = 10;     // radial_shells
  std::size_t directions = 16; // radial_shells
  std::size_t count = 100;     // seeded_uniform
  std::uint64_t seed = 0;
  /// Restrict to the closed forward ball of this quasi-metric radius about the basepoint.
  std::optional<double> clip_radius;
  /// Euclidean extent of radial shells; defaults to the clip ball's radius or 0.99.
  std::optional<double> max_norm;
};

void check_spec(const SampleSpec& spec);

/// Samples a finite measured space from the model. Weights are Euclidean cell volumes
/// (lebesgue) or 1/n (uniform); normalize rescales them to total mass 1.
/// The basepoint is the origin for ball models and the first point otherwise.
MeasuredSpace sample(const Model& model, const SampleSpec& spec, WeightModel weights = WeightModel::lebesgue,
                     bool normalize = false);

/// Distance matrix of the model restricted to the given points.
QuasiMetricSpace space_from_points(const Model& model, const std::vector<Point>& points);

/// (X, star, k d): distances scaled by k, weights and basepoint unchanged.
MeasuredSpace rescale(const MeasuredSpace& mspace, double k);

/// Segment [-half_width, half_width] on the grid k*pitch with probability weights
/// proportional to exp(-K x^2 / 2); basepoint at 0.
MeasuredSpace gaussian_line(double K, double half_width, double pitch);

/// Deterministic uniform doubles in [0, 1) from a 64-bit seed (platform independent).
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::uint64_t state_;
};

}  // namespace qms::models
