#include "qms/cd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include "qms/error.hpp"
#include "qms/quadrature.hpp"

namespace qms::cd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite_n(double N) { return std::isfinite(N); }

double mass_of(std::span<const double> w, std::span<const Index> set) {
  double s = 0.0;
  for (Index i : set) s += w[i];
  return s;
}

double support_diameter(const MeasuredSpace& mspace) {
  const IndexSet supp = mspace.support();
  if (supp.empty()) throw DomainError("reference measure has no mass");
  return diameter(mspace.space, supp);
}

void check_probability(std::span<const double> mu, std::span<const double> nu, const char* name) {
  if (mu.size() != nu.size()) throw StructureError(std::string(name) + " has the wrong length");
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] >= 0.0)) throw DomainError(std::string(name) + " has a negative weight");
    if (mu[i] > 0.0 && !(nu[i] > 0.0)) throw DomainError(std::string(name) + " charges a point outside supp nu");
    total += mu[i];
  }
  if (std::abs(total - 1.0) > transport::kMassTolerance)
    throw DomainError(std::string(name) + " is not a probability vector");
}

std::string short_number(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

double tolerance_from(double pitch, double factor) { return pitch > 0.0 ? factor * pitch : 1e-9; }

}  // namespace

double myers_diameter(double K, double N) {
  if (K > 0.0 && finite_n(N)) return std::numbers::pi * std::sqrt((N - 1.0) / K);
  return kInf;
}

double s_kn(double K, double N, double r) {
  if (!(N > 1.0) || !finite_n(N)) throw DomainError("s_{K,N} needs 1 < N < infinity");
  if (r < 0.0) throw DomainError("s_{K,N} needs r >= 0");
  if (K == 0.0) return r;
  const double scale = std::sqrt((N - 1.0) / std::abs(K));
  if (K > 0.0) {
    if (r > std::numbers::pi * scale * (1.0 + 1e-15)) throw DomainError("s_{K,N} evaluated beyond pi sqrt((N-1)/K)");
    return scale * std::sin(r / scale);
  }
  return scale * std::sinh(r / scale);
}

double beta(const DistortionParams& params, double d) {
  const double K = params.K, N = params.N, t = params.t;
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("distortion time outside [0, 1]");
  if (!(N >= 1.0)) throw DomainError("distortion dimension N must be >= 1");
  if (!(d >= 0.0)) throw DomainError("distortion distance must be >= 0");
  if (!finite_n(N)) return std::exp(K / 6.0 * (1.0 - t * t) * d * d);
  if (t == 0.0) return 1.0;
  if (N == 1.0) return K > 0.0 ? kInf : 1.0;
  if (K > 0.0 && d >= myers_diameter(K, N)) return kInf;
  if (K == 0.0 || d == 0.0) return 1.0;
  return std::pow(s_kn(K, N, t * d) / (t * s_kn(K, N, d)), N - 1.0);
}

// --- nonlinearities --------------------------------------------------------------

Nonlinearity Nonlinearity::un(double N) {
  if (!(N > 1.0) || !finite_n(N)) throw DomainError("U_N needs 1 < N < infinity");
  Nonlinearity u;
  u.kind_ = NonlinearityKind::un;
  u.param_ = N;
  u.name_ = "un:" + short_number(N);
  return u;
}

Nonlinearity Nonlinearity::entropy() {
  Nonlinearity u;
  u.kind_ = NonlinearityKind::entropy;
  u.name_ = "entropy";
  return u;
}

Nonlinearity Nonlinearity::power(double m) {
  if (!(m > 1.0) || !std::isfinite(m)) throw DomainError("power nonlinearity needs m > 1");
  Nonlinearity u;
  u.kind_ = NonlinearityKind::power;
  u.param_ = m;
  u.name_ = "power:" + short_number(m);
  return u;
}

Nonlinearity Nonlinearity::custom(std::string name, std::function<double(double)> fn) {
  if (!fn) throw StructureError("custom nonlinearity without a function");
  if (std::abs(fn(0.0)) > 1e-12) throw StructureError("nonlinearity must satisfy U(0) = 0");
  std::vector<double> r{0.0};
  for (double x = 1e-6; x <= 1e3; x *= 1.25) r.push_back(x);
  for (std::size_t k = 1; k + 1 < r.size(); ++k) {
    const double s0 = (fn(r[k]) - fn(r[k - 1])) / (r[k] - r[k - 1]);
    const double s1 = (fn(r[k + 1]) - fn(r[k])) / (r[k + 1] - r[k]);
    if (!std::isfinite(s0) || !std::isfinite(s1)) throw StructureError("nonlinearity is not finite on [0, 1e3]");
    if (s1 < s0 - 1e-9 * std::max(1.0, std::abs(s0))) {
      throw StructureError("nonlinearity " + name + " is not convex near r = " + std::to_string(r[k]));
    }
  }
  Nonlinearity u;
  u.kind_ = NonlinearityKind::custom;
  u.name_ = std::move(name);
  u.u_ = std::move(fn);
  return u;
}

Nonlinearity Nonlinearity::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  auto arg = [&]() {
    if (colon == std::string::npos) throw DomainError("nonlinearity " + spec + " needs a parameter");
    try {
      return std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw DomainError("bad nonlinearity parameter in " + spec);
    }
  };
  if (head == "entropy" || head == "H") return entropy();
  if (head == "un" || head == "U") return un(arg());
  if (head == "power") return power(arg());
  throw DomainError("unknown nonlinearity " + spec);
}

double Nonlinearity::operator()(double r) const {
  if (r == 0.0) return 0.0;
  switch (kind_) {
    case NonlinearityKind::un:
      return param_ * r * (1.0 - std::pow(r, -1.0 / param_));
    case NonlinearityKind::entropy:
      return r * std::log(r);
    case NonlinearityKind::power:
      return std::pow(r, param_) / (param_ - 1.0);
    case NonlinearityKind::custom:
      return u_(r);
  }
  return 0.0;
}

double Nonlinearity::d1(double r) const {
  switch (kind_) {
    case NonlinearityKind::un:
      return param_ - (param_ - 1.0) * std::pow(r, -1.0 / param_);
    case NonlinearityKind::entropy:
      return std::log(r) + 1.0;
    case NonlinearityKind::power:
      return param_ / (param_ - 1.0) * std::pow(r, param_ - 1.0);
    case NonlinearityKind::custom: {
      const double h = std::min(1e-5 * std::max(r, 1e-3), r / 2.0);
      return (u_(r + h) - u_(r - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double Nonlinearity::d2(double r) const {
  switch (kind_) {
    case NonlinearityKind::un:
      return (param_ - 1.0) / param_ * std::pow(r, -1.0 / param_ - 1.0);
    case NonlinearityKind::entropy:
      return 1.0 / r;
    case NonlinearityKind::power:
      return param_ * std::pow(r, param_ - 2.0);
    case NonlinearityKind::custom: {
      const double h = std::min(1e-4 * std::max(r, 1e-3), r / 2.0);
      return (u_(r + h) - 2.0 * u_(r) + u_(r - h)) / (h * h);
    }
  }
  return 0.0;
}

double Nonlinearity::p(double r) const {
  switch (kind_) {
    case NonlinearityKind::un:
      return std::pow(r, 1.0 - 1.0 / param_);
    case NonlinearityKind::entropy:
      return r;
    case NonlinearityKind::power:
      return std::pow(r, param_);
    case NonlinearityKind::custom:
      return r * d1(r) - (*this)(r);
  }
  return 0.0;
}

double Nonlinearity::p2(double r) const {
  switch (kind_) {
    case NonlinearityKind::un:
      return -p(r) / param_;
    case NonlinearityKind::entropy:
      return 0.0;
    case NonlinearityKind::power:
      return (param_ - 1.0) * std::pow(r, param_);
    case NonlinearityKind::custom:
      // p' = r U'', so p2 = r^2 U'' - p
      return r * r * d2(r) - p(r);
  }
  return 0.0;
}

double Nonlinearity::slope_at_zero() const {
  switch (kind_) {
    case NonlinearityKind::un:
    case NonlinearityKind::entropy:
      return -kInf;
    case NonlinearityKind::power:
      return 0.0;
    case NonlinearityKind::custom:
      return u_(1e-10) / 1e-10;
  }
  return 0.0;
}

double Nonlinearity::slope_at_infinity() const {
  switch (kind_) {
    case NonlinearityKind::un:
      return param_;
    case NonlinearityKind::entropy:
    case NonlinearityKind::power:
      return kInf;
    case NonlinearityKind::custom:
      return u_(1e10) / 1e10;
  }
  return 0.0;
}

double Nonlinearity::scaled(double r, double b) const {
  if (!std::isfinite(b)) return slope_at_zero();
  const double x = r / b;
  if (x == 0.0) return slope_at_zero();
  return (*this)(x) / x;
}

DcnReport dcn_membership(const Nonlinearity& u, double N, std::span<const double> r_grid) {
  if (!(N >= 1.0)) throw DomainError("DC_N needs N >= 1");
  std::vector<double> r(r_grid.begin(), r_grid.end());
  std::sort(r.begin(), r.end());
  if (r.empty()) throw DomainError("empty r grid");
  if (!(r.front() > 0.0)) throw DomainError("DC_N conditions are checked on r > 0");
  const double inv_n = finite_n(N) ? 1.0 / N : 0.0;

  DcnReport rep{true, kInf, r.front(), true, 0.0};
  double prev = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double p = u.p(r[k]), p2 = u.p2(r[k]);
    if (!std::isfinite(p) || !std::isfinite(p2)) {
      throw ComputationError(u.name() + " is not twice differentiable at r = " + std::to_string(r[k]));
    }
    const double cond = p2 + p * inv_n;
    if (cond < rep.min_condition) {
      rep.min_condition = cond;
      rep.worst_r = r[k];
    }
    if (cond < -1e-12 * std::max(1.0, std::abs(p))) rep.pass = false;
    const double q = p / std::pow(r[k], 1.0 - inv_n);
    if (k > 0) {
      const double drop = prev - q;
      if (drop > rep.worst_drop) rep.worst_drop = drop;
      if (drop > 1e-12 * std::max(1.0, std::abs(prev))) rep.monotone = false;
    }
    prev = q;
  }
  rep.pass = rep.pass && rep.monotone;
  return rep;
}

// --- functionals -----------------------------------------------------------------

double u_functional(const Nonlinearity& u, std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) throw StructureError("measure lengths differ");
  double sum = 0.0, singular = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0.0 || nu[i] < 0.0) throw DomainError("negative weight in u_functional");
    if (nu[i] > 0.0) {
      sum += u(mu[i] / nu[i]) * nu[i];
    } else {
      singular += mu[i];
    }
  }
  if (singular > 0.0) sum += u.slope_at_infinity() * singular;
  return sum;
}

double u_beta_functional(const Nonlinearity& u, const QuasiMetricSpace& space, const transport::Coupling& pi,
                         std::span<const double> nu, const DistortionParams& params, Direction direction) {
  if (nu.size() != space.size() || pi.n != space.size()) throw StructureError("coupling and measure sizes differ");
  const bool fwd = direction == Direction::forward;
  const std::vector<double> marginal = fwd ? pi.source_marginal() : pi.target_marginal();
  double sum = 0.0, singular = 0.0;
  bool minus_inf = false;
  for (const auto& e : pi.entries) {
    if (e.mass <= 0.0) continue;
    const Index z = fwd ? e.from : e.to;
    if (!(nu[z] > 0.0)) {
      singular += e.mass;
      continue;
    }
    const double rho = marginal[z] / nu[z];
    const double term = u.scaled(rho, beta(params, space(e.from, e.to)));
    if (term == -kInf) {
      minus_inf = true;
    } else {
      sum += e.mass * term;
    }
  }
  if (singular > 0.0) {
    const double s = u.slope_at_infinity();
    if (s == kInf) return kInf;
    sum += s * singular;
  }
  return minus_inf ? -kInf : sum;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::no_certificate:
      return "no_certificate";
    case Verdict::violation:
      return "violation";
    case Verdict::skipped:
      return "skipped";
  }
  return "skipped";
}

FunctionalReport make_report(std::string name, double lhs, double rhs, double tolerance, Verdict fail_verdict,
                             std::string note) {
  FunctionalReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.note = std::move(note);
  if (lhs == rhs) {
    r.slack = 0.0;  // also covers equal infinities
  } else {
    r.slack = rhs - lhs;
  }
  r.pass = r.slack >= -tolerance;
  r.verdict = r.pass ? Verdict::pass : fail_verdict;
  return r;
}

bool diameter_gate(const MeasuredSpace& mspace, double K, double N, double pitch) {
  if (!(K > 0.0) || !finite_n(N)) return false;
  return support_diameter(mspace) > myers_diameter(K, N) * (1.0 + 3.0 * pitch);
}

namespace {

FunctionalReport gate_report(const MeasuredSpace& mspace, double K, double N, double pitch) {
  return make_report("diameter", support_diameter(mspace), myers_diameter(K, N), myers_diameter(K, N) * 3.0 * pitch,
                     Verdict::violation, "support diameter exceeds pi sqrt((N-1)/K); CD(K,N) cannot hold");
}

std::vector<FunctionalReport> cd_reports_for_plan(const MeasuredSpace& mspace, const transport::Coupling& pi,
                                                  double K, double N, const Nonlinearity& u,
                                                  std::span<const double> ts, const CdOptions& opts) {
  const QuasiMetricSpace& space = mspace.space;
  const transport::DynamicalPlan plan = transport::dynamical_plan(space, pi, opts.chain_tol, opts.hop_radius);
  const transport::Interpolation interp = transport::interpolate(space, plan, ts);
  const double tol = tolerance_from(opts.pitch, opts.slack_factor);
  std::vector<FunctionalReport> out;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    const double lhs = u_functional(u, interp.measures[k], mspace.weights);
    double rhs = 0.0;
    if (t < 1.0) {
      rhs += (1.0 - t) * u_beta_functional(u, space, pi, mspace.weights, {K, N, 1.0 - t}, Direction::forward);
    }
    if (t > 0.0) {
      rhs += t * u_beta_functional(u, space, pi, mspace.weights, {K, N, t}, Direction::reversed);
    }
    out.push_back(make_report("cd t=" + short_number(t), lhs, rhs, tol, Verdict::no_certificate));
  }
  return out;
}

bool all_pass(const std::vector<FunctionalReport>& reps) {
  return std::all_of(reps.begin(), reps.end(), [](const FunctionalReport& r) { return r.pass; });
}

}  // namespace

std::vector<FunctionalReport> cd_check(const MeasuredSpace& mspace, std::span<const double> mu0,
                                       std::span<const double> mu1, double K, double N, const Nonlinearity& u,
                                       std::span<const double> ts, const CdOptions& opts) {
  if (ts.empty()) throw DomainError("cd_check needs at least one t");
  for (double t : ts)
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("cd_check time outside [0, 1]");
  check_probability(mu0, mspace.weights, "mu0");
  check_probability(mu1, mspace.weights, "mu1");
  if (diameter_gate(mspace, K, N, opts.pitch)) return {gate_report(mspace, K, N, opts.pitch)};

  transport::TransportProblem prob{mspace.space, {mu0.begin(), mu0.end()}, {mu1.begin(), mu1.end()}, 2.0};
  const transport::WassersteinResult w = transport::wasserstein(prob);
  std::vector<FunctionalReport> reps = cd_reports_for_plan(mspace, w.coupling, K, N, u, ts, opts);
  if (all_pass(reps)) return reps;

  const auto small = [](std::span<const double> m) {
    return std::count_if(m.begin(), m.end(), [](double x) { return x > 0.0; }) <= 4;
  };
  if (!opts.search_vertex_plans || !small(mu0) || !small(mu1)) return reps;

  for (const transport::Coupling& alt : transport::optimal_vertex_plans(prob)) {
    std::vector<FunctionalReport> alt_reps = cd_reports_for_plan(mspace, alt, K, N, u, ts, opts);
    if (all_pass(alt_reps)) {
      for (auto& r : alt_reps) r.note = "passes on another optimal vertex plan";
      return alt_reps;
    }
  }
  for (auto& r : reps) {
    if (!r.pass) {
      r.verdict = Verdict::violation;
      r.note = "every optimal vertex plan fails";
    }
  }
  return reps;
}

std::vector<FunctionalReport> brunn_minkowski_check(const MeasuredSpace& mspace, std::span<const Index> a0,
                                                    std::span<const Index> a1, double t, double K, double N,
                                                    const CdOptions& opts) {
  if (a0.empty() || a1.empty()) throw DomainError("Brunn-Minkowski needs nonempty sets");
  if (!(t > 0.0 && t < 1.0)) throw DomainError("Brunn-Minkowski needs 0 < t < 1");
  const QuasiMetricSpace& space = mspace.space;
  const auto& nu = mspace.weights;
  for (std::span<const Index> set : {a0, a1}) {
    for (Index i : set) {
      if (i >= space.size()) throw StructureError("set index out of range");
      if (!(nu[i] > 0.0)) throw DomainError("Brunn-Minkowski sets must lie in supp nu");
    }
  }

  transport::Coupling all;
  all.n = space.size();
  for (Index x : a0)
    for (Index y : a1) all.entries.push_back({x, y, 1.0});
  const transport::DynamicalPlan plan = transport::dynamical_plan(space, all, opts.chain_tol, opts.hop_radius);
  std::set<Index> bary;
  double beta_0 = kInf, beta_1 = kInf, dmin = kInf, dmax = 0.0;
  for (const auto& chain : plan.chains) {
    bary.insert(transport::chain_point(space, chain, t));
    const double d = space(chain.from, chain.to);
    beta_0 = std::min(beta_0, beta({K, N, 1.0 - t}, d));
    beta_1 = std::min(beta_1, beta({K, N, t}, d));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  const IndexSet bset(bary.begin(), bary.end());
  const double m0 = mass_of(nu, a0), m1 = mass_of(nu, a1), mb = mass_of(nu, bset);
  const double tol = tolerance_from(opts.pitch, opts.slack_factor);

  std::vector<FunctionalReport> out;
  if (finite_n(N)) {
    const double e = 1.0 / N;
    const double rhs = (1.0 - t) * std::pow(beta_0, e) * std::pow(m0, e) + t * std::pow(beta_1, e) * std::pow(m1, e);
    out.push_back(make_report("brunn-minkowski", std::pow(mb, e), rhs, tol));
    if (K >= 0.0) {
      out.push_back(make_report("brunn-minkowski plain", std::pow(mb, e),
                                (1.0 - t) * std::pow(m0, e) + t * std::pow(m1, e), tol));
    }
  } else {
    const double kp = std::max(K, 0.0), km = -std::min(K, 0.0);
    const double rhs = (1.0 - t) * std::log(1.0 / m0) + t * std::log(1.0 / m1) +
                       t * (1.0 - t) / 2.0 * (km * dmax * dmax - kp * dmin * dmin);
    out.push_back(make_report("brunn-minkowski log", std::log(1.0 / mb), rhs, tol));
  }
  return out;
}

BishopGromovProfile bishop_gromov_profile(const MeasuredSpace& mspace, Index x0, double K, double N,
                                          std::span<const double> radii, double rel_tol) {
  if (!finite_n(N) || !(N >= 1.0)) throw DomainError("Bishop-Gromov profile needs 1 <= N < infinity");
  if (x0 >= mspace.size()) throw StructureError("centre index out of range");
  if (!(mspace.weights[x0] > 0.0)) throw DomainError("centre must lie in supp nu");
  BishopGromovProfile prof{};
  prof.tolerance = rel_tol;
  prof.monotone = true;
  double prev_r = 0.0;
  for (double r : radii) {
    if (!(r > prev_r)) throw DomainError("radii must be positive and increasing");
    prev_r = r;
    if (K > 0.0 && N > 1.0 && r > myers_diameter(K, N)) throw DomainError("radius beyond pi sqrt((N-1)/K)");
    const IndexSet b = ball(mspace.space, {x0, r, Orientation::forward, false});
    double denom = r;
    if (N > 1.0) {
      denom = integrate([&](double s) { return std::pow(s_kn(K, N, s), N - 1.0); }, 0.0, r, 1e-10).value;
    }
    prof.radii.push_back(r);
    prof.mass.push_back(mass_of(mspace.weights, b));
    prof.denominator.push_back(denom);
    prof.profile.push_back(prof.mass.back() / denom);
  }
  for (std::size_t k = 1; k < prof.profile.size(); ++k) {
    const double inc = prof.profile[k] / prof.profile[k - 1] - 1.0;
    prof.worst_increase = std::max(prof.worst_increase, inc);
    if (inc > rel_tol) prof.monotone = false;
  }
  return prof;
}

GradNorms grad_norms(const QuasiMetricSpace& space, std::span<const double> f, double neighbor_radius) {
  const std::size_t n = space.size();
  if (f.size() != n) throw StructureError("function length does not match point count");
  GradNorms g{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<char>(n, 1)};
  bool any = false;
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      const double d = space(x, y);
      if (y == x || !(d > 0.0) || !(d < neighbor_radius)) continue;
      g.isolated[x] = 0;
      any = true;
      g.full[x] = std::max(g.full[x], std::abs(f[y] - f[x]) / d);
      g.descent[x] = std::max(g.descent[x], std::max(f[x] - f[y], 0.0) / d);
    }
  }
  if (!any) throw DomainError("no point has a neighbour within the gradient radius");
  return g;
}

double fisher_information(const QuasiMetricSpace& space, std::span<const double> mu, std::span<const double> nu,
                          double neighbor_radius) {
  const std::size_t n = space.size();
  std::vector<double> rho(n, 0.0);
  for (Index i = 0; i < n; ++i)
    if (nu[i] > 0.0) rho[i] = mu[i] / nu[i];
  const GradNorms g = grad_norms(space, rho, neighbor_radius);
  double info = 0.0;
  for (Index i = 0; i < n; ++i)
    if (rho[i] > 0.0) info += g.descent[i] * g.descent[i] / rho[i] * nu[i];
  return info;
}

std::vector<FunctionalReport> functional_inequality_suite(const MeasuredSpace& input_space, double K, double N,
                                                          const SuiteInput& input, const SuiteOptions& opts) {
  if (!(N >= 1.0)) throw DomainError("N must be >= 1");
  if (!(K > 0.0) && input.f) throw DomainError("Poincare and Lichnerowicz checks need K > 0");
  const MeasuredSpace mspace = input_space.normalized();
  const QuasiMetricSpace& space = mspace.space;
  const std::vector<double>& nu = mspace.weights;
  const double h = opts.pitch;
  const double radius = opts.neighbor_radius.value_or(h > 0.0 ? 1.5 * h : transport::default_hop_radius(space));
  const double rel = opts.relative_tol;
  auto rel_tol = [&](double a, double b) { return rel * std::max(std::abs(a), std::abs(b)) + 1e-12; };

  std::vector<FunctionalReport> out;
  if (K > 0.0 && finite_n(N)) {
    const double dmax = myers_diameter(K, N);
    FunctionalReport diam = make_report("diameter", support_diameter(mspace), dmax, dmax * opts.gate_factor * h);
    if (!diam.pass) diam.note = "diameter gate: CD(K,N) inequalities not asserted";
    out.push_back(diam);
    if (!diam.pass) {
      for (const char* name : {"hwi", "log-sobolev", "poincare", "lichnerowicz", "doubling"}) {
        FunctionalReport s;
        s.name = name;
        s.note = "diameter gate";
        out.push_back(s);
      }
      return out;
    }
  }

  if (input.mu0) {
    const std::vector<double>& mu0 = *input.mu0;
    check_probability(mu0, nu, "mu0");
    const std::vector<double> mu1 = input.mu1.value_or(nu);
    check_probability(mu1, nu, "mu1");
    const Nonlinearity H = Nonlinearity::entropy();
    const double h0 = u_functional(H, mu0, nu), h1 = u_functional(H, mu1, nu);
    const double info = fisher_information(space, mu0, nu, radius);
    const double w2 = transport::wasserstein_distance(space, mu0, mu1, 2.0);
    const double hwi_rhs = h1 + w2 * std::sqrt(info) - K / 2.0 * w2 * w2;
    out.push_back(make_report("hwi", h0, hwi_rhs, rel_tol(h0, hwi_rhs)));
    if (K > 0.0) {
      out.push_back(make_report("log-sobolev", h0, info / (2.0 * K), rel_tol(h0, info / (2.0 * K))));
    } else {
      FunctionalReport s;
      s.name = "log-sobolev";
      s.note = "needs K > 0";
      out.push_back(s);
    }
  }

  if (input.f) {
    std::vector<double> f = *input.f;
    if (f.size() != nu.size()) throw StructureError("test function length does not match point count");
    double mean = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) mean += f[i] * nu[i];
    const bool centered = std::abs(mean) > 1e-12;
    for (double& v : f) v -= mean;
    const GradNorms g = grad_norms(space, f, radius);
    double l2 = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      l2 += f[i] * f[i] * nu[i];
      energy += g.descent[i] * g.descent[i] * nu[i];
    }
    const std::string note = centered ? "f was centred against nu" : "";
    out.push_back(make_report("poincare", l2, energy / K, rel_tol(l2, energy / K), Verdict::violation, note));
    if (N > 1.0) {
      const double c = finite_n(N) ? (N - 1.0) / (N * K) : 1.0 / K;
      out.push_back(make_report("lichnerowicz", l2, c * energy, rel_tol(l2, c * energy), Verdict::violation, note));
    }
  }

  if (!input.doubling_radii.empty() && finite_n(N) && N >= 1.0) {
    double worst_ratio = 0.0, worst_bound = 1.0, worst_excess = -kInf, worst_r = 0.0;
    for (double r : input.doubling_radii) {
      if (!(r > 0.0)) throw DomainError("doubling radii must be positive");
      if (K > 0.0 && N > 1.0 && 2.0 * r > myers_diameter(K, N)) continue;
      auto integral = [&](double upto) {
        if (N == 1.0) return upto;
        return integrate([&](double s) { return std::pow(s_kn(K, N, s), N - 1.0); }, 0.0, upto, 1e-12).value;
      };
      const double bound = integral(2.0 * r) / integral(r);
      for (Index x : mspace.support()) {
        const double small = mass_of(nu, ball(space, {x, r, Orientation::forward, true}));
        const double big = mass_of(nu, ball(space, {x, 2.0 * r, Orientation::forward, true}));
        const double ratio = big / small;
        const double excess = ratio / bound;
        if (excess > worst_excess) {
          worst_excess = excess;
          worst_ratio = ratio;
          worst_bound = bound;
          worst_r = r;
        }
      }
    }
    if (worst_r > 0.0) {
      const double tol = h > 0.0 ? worst_bound * opts.gate_factor * h / worst_r : 1e-9;
      out.push_back(make_report("doubling", worst_ratio, worst_bound, tol, Verdict::violation,
                                "worst radius " + short_number(worst_r)));
    }
  }
  return out;
}

}  // namespace qms::cd
