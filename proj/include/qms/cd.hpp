#pragma once

// Curvature-dimension layer: distortion coefficients, DC_N nonlinearities,
// displacement-convexity functionals and the geometric/functional inequality checkers.

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qms/space.hpp"
#include "qms/transport.hpp"

namespace qms::cd {

inline constexpr double kInfiniteN = std::numeric_limits<double>::infinity();

struct DistortionParams {
  double K = 0.0;
  double N = kInfiniteN;
  double t = 0.5;
};

/// pi sqrt((N-1)/K) for K > 0, infinity otherwise.
double myers_diameter(double K, double N);

/// sqrt((N-1)/K) sin(r sqrt(K/(N-1))), r, or the sinh branch. Needs 1 < N < inf;
/// throws DomainError past the K > 0 cutoff.
double s_kn(double K, double N, double r);

/// beta_t^{(K,N)} at distance d; +infinity on the K > 0 cutoff. Finite N gives 1 at t = 0;
/// N = inf uses exp(K (1 - t^2) d^2 / 6) on all of [0, 1].
double beta(const DistortionParams& params, double d);

enum class NonlinearityKind { un, entropy, power, custom };

/// A convex U with U(0) = 0 and its derived quantities p = rU' - U, p2 = r p' - p.
class Nonlinearity {
 public:
  /// U_N(r) = N r (1 - r^{-1/N}), 1 < N < inf.
  static Nonlinearity un(double N);
  /// H(r) = r log r.
  static Nonlinearity entropy();
  /// r^m / (m - 1), m > 1.
  static Nonlinearity power(double m);
  /// User-supplied U; checked for U(0) = 0 and convexity on a grid (StructureError otherwise).
  /// Derivatives come from central differences.
  static Nonlinearity custom(std::string name, std::function<double(double)> u);
  /// un:N, entropy, power:m. Throws DomainError on unknown names.
  static Nonlinearity parse(const std::string& spec);

  [[nodiscard]] NonlinearityKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] double param() const noexcept { return param_; }

  double operator()(double r) const;  // U(r)
  double d1(double r) const;          // U'(r)
  double d2(double r) const;          // U''(r)
  double p(double r) const;
  double p2(double r) const;
  /// U'(0) and U'(infinity), possibly infinite.
  [[nodiscard]] double slope_at_zero() const;
  [[nodiscard]] double slope_at_infinity() const;
  /// U(r / b) * b / r with the conventions U(0)/0 = U'(0) for b = inf.
  double scaled(double r, double b) const;

 private:
  NonlinearityKind kind_ = NonlinearityKind::entropy;
  std::string name_;
  double param_ = 0.0;
  std::function<double(double)> u_;
};

struct DcnReport {
  bool pass;
  double min_condition;  // min over the grid of p2 + p/N
  double worst_r;
  bool monotone;         // p / r^{1-1/N} nondecreasing on the grid
  double worst_drop;
};

DcnReport dcn_membership(const Nonlinearity& u, double N, std::span<const double> r_grid);

/// U_nu(mu) = sum U(mu/nu) nu + U'(inf) (mass of mu where nu = 0).
double u_functional(const Nonlinearity& u, std::span<const double> mu, std::span<const double> nu);

enum class Direction { forward, reversed };

/// forward: sum pi(x,y) U(rho0(x)/beta)/(rho0(x)/beta) with beta = beta_t(d(x,y)), rho0 the density
/// of the first marginal; reversed: the same over rho1(y) of the second marginal (the swapped plan).
double u_beta_functional(const Nonlinearity& u, const QuasiMetricSpace& space, const transport::Coupling& pi,
                         std::span<const double> nu, const DistortionParams& params, Direction direction);

enum class Verdict { pass, no_certificate, violation, skipped };
std::string verdict_name(Verdict v);

struct FunctionalReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  bool pass = false;
  Verdict verdict = Verdict::skipped;
  std::string note;
};

/// Fills slack/pass/verdict; a failure yields `fail_verdict`.
FunctionalReport make_report(std::string name, double lhs, double rhs, double tolerance,
                             Verdict fail_verdict = Verdict::violation, std::string note = {});

struct CdOptions {
  double pitch = 0.0;              // sampling pitch h; tolerances scale with it
  double slack_factor = 5.0;       // CD tolerance = slack_factor * h
  std::optional<double> hop_radius;
  transport::ChainTolerance chain_tol{};
  bool search_vertex_plans = true;  // supports <= 4: try every optimal vertex plan before calling it a violation
};

/// True when K > 0, N finite and the support diameter exceeds the Myers bound by more than 3h.
bool diameter_gate(const MeasuredSpace& mspace, double K, double N, double pitch);

/// Distorted displacement convexity of U_nu on the canonical optimal plan for cost d^2, one report per t.
std::vector<FunctionalReport> cd_check(const MeasuredSpace& mspace, std::span<const double> mu0,
                                       std::span<const double> mu1, double K, double N, const Nonlinearity& u,
                                       std::span<const double> ts, const CdOptions& opts = {});

/// Brunn-Minkowski for t-barycentres built from hop chains. N finite: the distorted form, plus
/// the plain form when K >= 0. N infinite: the logarithmic form.
std::vector<FunctionalReport> brunn_minkowski_check(const MeasuredSpace& mspace, std::span<const Index> a0,
                                                    std::span<const Index> a1, double t, double K, double N,
                                                    const CdOptions& opts = {});

struct BishopGromovProfile {
  std::vector<double> radii;
  std::vector<double> mass;         // nu of the open forward ball
  std::vector<double> denominator;  // integral_0^r s_{K,N}^{N-1}
  std::vector<double> profile;
  bool monotone;
  double worst_increase;  // largest relative increase f(r_{k+1}) / f(r_k) - 1
  double tolerance;
};

/// f(r) = nu[B+_{x0}(r)] / integral_0^r s^{N-1}; nonincreasing up to rel_tol.
BishopGromovProfile bishop_gromov_profile(const MeasuredSpace& mspace, Index x0, double K, double N,
                                          std::span<const double> radii, double rel_tol);

struct GradNorms {
  std::vector<double> full;     // |grad f|
  std::vector<double> descent;  // |grad^- f|
  std::vector<char> isolated;
};

/// Discrete slopes: max over y with 0 < d(x,y) < radius of |f(y)-f(x)|/d(x,y) and [f(y)-f(x)]_-/d(x,y).
GradNorms grad_norms(const QuasiMetricSpace& space, std::span<const double> f, double neighbor_radius);

/// sum over rho > 0 of |grad^- rho|^2 / rho * nu, rho = mu / nu.
double fisher_information(const QuasiMetricSpace& space, std::span<const double> mu, std::span<const double> nu,
                          double neighbor_radius);

struct SuiteInput {
  std::optional<std::vector<double>> mu0;  // log-Sobolev and HWI
  std::optional<std::vector<double>> mu1;  // HWI target; nu when absent
  std::optional<std::vector<double>> f;    // Poincare and Lichnerowicz
  std::vector<double> doubling_radii;
};

struct SuiteOptions {
  double pitch = 0.0;
  std::optional<double> neighbor_radius;  // defaults to 1.5 h, or the hop default without a pitch
  double relative_tol = 0.10;             // entropy-type inequalities
  double gate_factor = 3.0;               // diameter and doubling tolerance, times h
};

/// HWI, log-Sobolev, Poincare, Lichnerowicz, diameter and doubling checks on the normalized measure.
std::vector<FunctionalReport> functional_inequality_suite(const MeasuredSpace& mspace, double K, double N,
                                                          const SuiteInput& input, const SuiteOptions& opts = {});

}  // namespace qms::cd
