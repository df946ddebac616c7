#pragma once

// Exact optimal transport with asymmetric cost d(x,y)^p between finite measures,
// the Kantorovich-Rubinstein dual, and discrete displacement interpolation.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qms/space.hpp"

namespace qms::transport {

struct TransportProblem {
  QuasiMetricSpace space;
  std::vector<double> mu;
  std::vector<double> nu;
  double p = 1.0;
};

/// Masses must agree with 1 to this tolerance.
inline constexpr double kMassTolerance = 1e-12;

/// Throws StructureError / DomainError when the problem is malformed.
void check_problem(const TransportProblem& prob);

struct PlanEntry {
  Index from;
  Index to;
  double mass;
};

/// Sparse transport plan on an n-point space; entries sorted by (from, to).
struct Coupling {
  std::size_t n = 0;
  std::vector<PlanEntry> entries;

  [[nodiscard]] Matrix dense() const;
  [[nodiscard]] std::vector<double> source_marginal() const;
  [[nodiscard]] std::vector<double> target_marginal() const;
  /// sum of mass * d(from, to)^p
  [[nodiscard]] double cost(const QuasiMetricSpace& space, double p) const;
};

struct WassersteinResult {
  double value;  // W_p
  double cost;   // W_p^p, the LP optimum
  Coupling coupling;
  double dual_value;  // sum u_i mu_i + sum v_j nu_j at the final basis
  std::size_t pivots;
};

/// Exact W_p(mu, nu) by the transportation simplex; the optimal basis is certified by
/// complementary slackness before returning (ComputationError otherwise).
WassersteinResult wasserstein(const TransportProblem& prob);

/// Convenience: W_p only.
double wasserstein_distance(const QuasiMetricSpace& space, std::span<const double> mu, std::span<const double> nu,
                            double p);

/// Every distinct optimal vertex of the transportation polytope, found by enumerating spanning-tree
/// bases. Needs at most 4 atoms in each support (DomainError otherwise).
std::vector<Coupling> optimal_vertex_plans(const TransportProblem& prob, double rel_tol = 1e-9);

struct KrDual {
  double value;                    // sum psi (nu - mu)
  std::vector<double> potential;   // psi on every point, psi(y) - psi(x) <= d(x, y)
};

/// sup over asymmetric 1-Lipschitz psi of int psi dnu - int psi dmu, by a dense simplex
/// independent of the primal solver. Requires p == 1.
KrDual kr_dual(const TransportProblem& prob);

struct AsymmetryReport {
  double lhs;  // W_q(nu, mu)
  double rhs;  // Theta(W_p(star, mu) + W_p(mu, nu)) * W_p(mu, nu)
  double slack;
  bool pass;
  double w_star_mu;
  double w_mu_nu;
  double theta_value;
};

/// Checks W_q(nu, mu) <= Theta(W_p(delta_star, mu) + W_p(mu, nu)) W_p(mu, nu) with slack tolerance 1e-9.
/// Concavity of Theta^{qp/(p-q)} is the caller's responsibility.
AsymmetryReport asymmetry_bound_check(const MeasuredSpace& mspace, std::span<const double> mu,
                                      std::span<const double> nu, double p, double q,
                                      const std::function<double(double)>& theta);
AsymmetryReport asymmetry_bound_check(const MeasuredSpace& mspace, std::span<const double> mu,
                                      std::span<const double> nu, double p, double q, const ThetaBound& theta);

// --- displacement interpolation ------------------------------------------------

/// A chain is accepted when length <= d(from, to) * (1 + rel) + abs.
struct ChainTolerance {
  double rel = 0.5;
  double abs = 0.0;
};

struct Chain {
  Index from;
  Index to;
  IndexSet path;  // starts at from, ends at to
  double length;
};

struct DynamicalPlan {
  Coupling coupling;
  std::vector<Chain> chains;  // parallel to coupling.entries
  std::vector<double> mu;
  std::vector<double> nu;
  double hop_radius;
};

/// 1.5 times the largest forward nearest-neighbour distance.
double default_hop_radius(const QuasiMetricSpace& space);

/// Attaches to every plan pair a shortest directed chain through hops of forward length
/// < hop_radius (finer chains win ties). Throws ComputationError when a chain misses the tolerance.
DynamicalPlan dynamical_plan(const QuasiMetricSpace& space, const Coupling& coupling, ChainTolerance tol = {},
                             std::optional<double> hop_radius = std::nullopt);

/// e_t on a chain: the vertex whose cumulative length is nearest t * length, ties to the earlier one.
Index chain_point(const QuasiMetricSpace& space, const Chain& chain, double t);

struct Interpolation {
  std::vector<double> ts;
  std::vector<std::vector<double>> measures;
};

Interpolation interpolate(const QuasiMetricSpace& space, const DynamicalPlan& plan, std::span<const double> ts);

struct GeodesyReport {
  double abs_residual;
  double rel_residual;
  double worst_s;
  double worst_t;
  double w01;
};

/// max over s < t in the interpolation of |W_p(mu_s, mu_t) - (t - s) W_p(mu_0, mu_1)|,
/// with mu_0, mu_1 taken from the first and last entries.
GeodesyReport geodesy_check(const QuasiMetricSpace& space, const Interpolation& interp, double p);

}  // namespace qms::transport
