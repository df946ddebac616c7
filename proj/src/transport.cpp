#include "qms/transport.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>

#include "lp.hpp"
#include "qms/error.hpp"

namespace qms::transport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Weight of the squared-hop penalty that makes finer chains win exact length ties.
constexpr double kSubdivisionBias = 1e-9;

double total(std::span<const double> w) {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

void check_measure(std::span<const double> w, std::size_t n, const char* name) {
  if (w.size() != n) throw StructureError(std::string(name) + " has the wrong length");
  for (double x : w)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(std::string(name) + " has a negative or non-finite weight");
  if (std::abs(total(w) - 1.0) > kMassTolerance)
    throw DomainError(std::string(name) + " is not a probability vector (mass " + std::to_string(total(w)) + ")");
}

IndexSet positive(std::span<const double> w) {
  IndexSet out;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) out.push_back(i);
  return out;
}

std::string pair_name(Index a, Index b) { return "(" + std::to_string(a) + ", " + std::to_string(b) + ")"; }

}  // namespace

void check_problem(const TransportProblem& prob) {
  const std::size_t n = prob.space.size();
  if (n == 0) throw StructureError("transport on an empty space");
  check_measure(prob.mu, n, "mu");
  check_measure(prob.nu, n, "nu");
  if (!(prob.p >= 1.0) || !std::isfinite(prob.p)) throw DomainError("transport order p must be finite and >= 1");
}

Matrix Coupling::dense() const {
  Matrix m(n, n, 0.0);
  for (const auto& e : entries) m(e.from, e.to) += e.mass;
  return m;
}

std::vector<double> Coupling::source_marginal() const {
  std::vector<double> out(n, 0.0);
  for (const auto& e : entries) out[e.from] += e.mass;
  return out;
}

std::vector<double> Coupling::target_marginal() const {
  std::vector<double> out(n, 0.0);
  for (const auto& e : entries) out[e.to] += e.mass;
  return out;
}

double Coupling::cost(const QuasiMetricSpace& space, double p) const {
  double c = 0.0;
  for (const auto& e : entries) c += e.mass * std::pow(space(e.from, e.to), p);
  return c;
}

WassersteinResult wasserstein(const TransportProblem& prob) {
  check_problem(prob);
  const IndexSet rows = positive(prob.mu), cols = positive(prob.nu);
  Matrix cost(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) cost(i, j) = std::pow(prob.space(rows[i], cols[j]), prob.p);
  std::vector<double> a(rows.size()), b(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) a[i] = prob.mu[rows[i]];
  for (std::size_t j = 0; j < cols.size(); ++j) b[j] = prob.nu[cols[j]];

  const detail::TransportationSolution sol = detail::solve_transportation(cost, a, b);
  if (!sol.certified) throw ComputationError("transport solution failed the complementary slackness check");

  WassersteinResult out;
  out.coupling.n = prob.space.size();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (sol.flow(i, j) > 0.0) out.coupling.entries.push_back({rows[i], cols[j], sol.flow(i, j)});
  out.cost = std::max(0.0, sol.primal);
  out.value = std::pow(out.cost, 1.0 / prob.p);
  out.dual_value = sol.dual;
  out.pivots = sol.pivots;
  return out;
}

double wasserstein_distance(const QuasiMetricSpace& space, std::span<const double> mu, std::span<const double> nu,
                            double p) {
  TransportProblem prob{space, {mu.begin(), mu.end()}, {nu.begin(), nu.end()}, p};
  return wasserstein(prob).value;
}

std::vector<Coupling> optimal_vertex_plans(const TransportProblem& prob, double rel_tol) {
  check_problem(prob);
  const IndexSet rows = positive(prob.mu), cols = positive(prob.nu);
  const std::size_t m = rows.size(), k = cols.size();
  if (m > 4 || k > 4) throw DomainError("vertex enumeration needs supports of at most 4 atoms");
  const std::size_t cells = m * k, basis_size = m + k - 1;

  std::vector<std::vector<double>> vertices;
  std::vector<double> costs;
  for (std::uint32_t mask = 0; mask < (1U << cells); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != basis_size) continue;
    // peel leaves of the candidate tree; a cycle leaves no leaf before all cells are fixed
    std::vector<double> ra(m), rb(k), flow(cells, 0.0);
    for (std::size_t i = 0; i < m; ++i) ra[i] = prob.mu[rows[i]];
    for (std::size_t j = 0; j < k; ++j) rb[j] = prob.nu[cols[j]];
    std::uint32_t open = mask;
    bool ok = true;
    while (open != 0 && ok) {
      bool peeled = false;
      for (std::size_t node = 0; node < m + k && !peeled; ++node) {
        std::size_t deg = 0, cell = 0;
        for (std::size_t c = 0; c < cells; ++c) {
          if (!(open >> c & 1U)) continue;
          if ((node < m && c / k == node) || (node >= m && c % k == node - m)) {
            ++deg;
            cell = c;
          }
        }
        if (deg != 1) continue;
        const std::size_t i = cell / k, j = cell % k;
        const double val = node < m ? ra[i] : rb[j];
        if (val < -1e-12) ok = false;
        flow[cell] = std::max(0.0, val);
        ra[i] -= val;
        rb[j] -= val;
        open &= ~(1U << cell);
        peeled = true;
      }
      if (!peeled) ok = false;
    }
    if (!ok) continue;
    bool balanced = true;
    for (double r : ra) balanced = balanced && std::abs(r) <= 1e-9;
    for (double r : rb) balanced = balanced && std::abs(r) <= 1e-9;
    if (!balanced) continue;
    double c = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell)
      c += flow[cell] * std::pow(prob.space(rows[cell / k], cols[cell % k]), prob.p);
    bool seen = false;
    for (const auto& v : vertices) {
      bool same = true;
      for (std::size_t cell = 0; cell < cells && same; ++cell) same = std::abs(v[cell] - flow[cell]) <= 1e-12;
      seen = seen || same;
    }
    if (seen) continue;
    vertices.push_back(std::move(flow));
    costs.push_back(c);
  }

  const double best = *std::min_element(costs.begin(), costs.end());
  std::vector<Coupling> out;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (costs[v] > best + rel_tol * std::max(1.0, best)) continue;
    Coupling cpl;
    cpl.n = prob.space.size();
    for (std::size_t cell = 0; cell < cells; ++cell)
      if (vertices[v][cell] > 0.0) cpl.entries.push_back({rows[cell / k], cols[cell % k], vertices[v][cell]});
    out.push_back(std::move(cpl));
  }
  return out;
}

KrDual kr_dual(const TransportProblem& prob) {
  check_problem(prob);
  if (prob.p != 1.0) throw DomainError("the Kantorovich-Rubinstein dual needs p = 1");
  const QuasiMetricSpace& d = prob.space;
  const std::size_t n = d.size();

  IndexSet pts;
  for (Index i = 0; i < n; ++i)
    if (prob.mu[i] > 0.0 || prob.nu[i] > 0.0) pts.push_back(i);
  const std::size_t s = pts.size();

  // psi at pts[0] is pinned to 0; phi_a = psi_a + d(a, pts[0]) >= 0 for a >= 1.
  const Index o = pts[0];
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  const std::size_t vars = s - 1;
  auto add_row = [&](std::size_t plus, std::size_t minus, double bound) {
    std::vector<double> row(vars, 0.0);
    if (plus > 0) row[plus - 1] += 1.0;
    if (minus > 0) row[minus - 1] -= 1.0;
    if (bound < 0.0) {
      if (bound < -1e-9 * std::max(1.0, diameter(d)))
        throw DomainError("kr_dual needs the triangle inequality on the support");
      bound = 0.0;
    }
    rows.push_back(std::move(row));
    rhs.push_back(bound);
  };
  for (std::size_t ia = 0; ia < s; ++ia) {
    for (std::size_t ib = 0; ib < s; ++ib) {
      if (ia == ib || ib == 0) continue;  // the ib == 0 rows reduce to phi >= 0
      const Index a = pts[ia], b = pts[ib];
      // psi_b - psi_a <= d(a, b)
      add_row(ib, ia, d(a, b) + d(b, o) - d(a, o));
    }
  }
  std::vector<double> c(vars), w(s);
  for (std::size_t ia = 0; ia < s; ++ia) {
    w[ia] = prob.nu[pts[ia]] - prob.mu[pts[ia]];
    if (ia > 0) c[ia - 1] = w[ia];
  }

  std::vector<double> psi_s(s, 0.0);
  if (vars > 0) {
    Matrix a(rows.size(), vars);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < vars; ++j) a(r, j) = rows[r][j];
    const detail::DenseLpSolution sol = detail::solve_dense_lp(a, rhs, c);
    for (std::size_t ia = 1; ia < s; ++ia) psi_s[ia] = sol.x[ia - 1] - d(pts[ia], o);
  }

  KrDual out;
  out.value = 0.0;
  for (std::size_t ia = 0; ia < s; ++ia) out.value += psi_s[ia] * w[ia];
  // extend to every point by the smallest 1-Lipschitz majorant; unchanged on pts
  out.potential.assign(n, kInf);
  for (Index y = 0; y < n; ++y)
    for (std::size_t ia = 0; ia < s; ++ia) out.potential[y] = std::min(out.potential[y], psi_s[ia] + d(pts[ia], y));
  for (std::size_t ia = 0; ia < s; ++ia) out.potential[pts[ia]] = psi_s[ia];
  return out;
}

AsymmetryReport asymmetry_bound_check(const MeasuredSpace& mspace, std::span<const double> mu,
                                      std::span<const double> nu, double p, double q,
                                      const std::function<double(double)>& theta) {
  if (q > p) throw DomainError("asymmetry bound needs q <= p");
  if (q < 1.0) throw DomainError("asymmetry bound needs q >= 1");
  if (!mspace.basepoint) throw StructureError("asymmetry bound needs a basepoint");
  const QuasiMetricSpace& d = mspace.space;
  const Index star = *mspace.basepoint;
  double w_star = 0.0;
  for (Index x = 0; x < d.size(); ++x) w_star += mu[x] * std::pow(d(star, x), p);
  w_star = std::pow(w_star, 1.0 / p);

  AsymmetryReport r{};
  r.w_star_mu = w_star;
  r.w_mu_nu = wasserstein_distance(d, mu, nu, p);
  r.lhs = wasserstein_distance(d, nu, mu, q);
  r.theta_value = theta(w_star + r.w_mu_nu);
  r.rhs = r.theta_value * r.w_mu_nu;
  r.slack = r.rhs - r.lhs;
  r.pass = r.slack >= -1e-9;
  return r;
}

AsymmetryReport asymmetry_bound_check(const MeasuredSpace& mspace, std::span<const double> mu,
                                      std::span<const double> nu, double p, double q, const ThetaBound& theta) {
  return asymmetry_bound_check(mspace, mu, nu, p, q, [&theta](double r) { return theta(r); });
}

double default_hop_radius(const QuasiMetricSpace& space) {
  double worst = 0.0;
  for (Index i = 0; i < space.size(); ++i) {
    double nn = kInf;
    for (Index j = 0; j < space.size(); ++j)
      if (j != i) nn = std::min(nn, space(i, j));
    if (std::isfinite(nn)) worst = std::max(worst, nn);
  }
  return 1.5 * worst;
}

DynamicalPlan dynamical_plan(const QuasiMetricSpace& space, const Coupling& coupling, ChainTolerance tol,
                             std::optional<double> hop_radius) {
  if (coupling.n != space.size()) throw StructureError("coupling does not live on this space");
  const double radius = hop_radius.value_or(default_hop_radius(space));
  if (!(radius > 0.0)) throw DomainError("hop radius must be positive");
  const std::size_t n = space.size();

  DynamicalPlan plan;
  plan.coupling = coupling;
  plan.mu = coupling.source_marginal();
  plan.nu = coupling.target_marginal();
  plan.hop_radius = radius;

  std::map<Index, std::vector<Index>> parents;  // per source: shortest-path tree
  for (const auto& e : coupling.entries) {
    if (parents.contains(e.from)) continue;
    std::vector<double> key(n, kInf);
    std::vector<Index> parent(n, n);
    std::vector<char> done(n, 0);
    key[e.from] = 0.0;
    parent[e.from] = e.from;
    for (std::size_t step = 0; step < n; ++step) {
      Index u = n;
      for (Index i = 0; i < n; ++i)
        if (!done[i] && key[i] < kInf && (u == n || key[i] < key[u])) u = i;
      if (u == n) break;
      done[u] = 1;
      for (Index v = 0; v < n; ++v) {
        const double h = space(u, v);
        if (done[v] || v == u || !(h < radius)) continue;
        const double cand = key[u] + h * (1.0 + kSubdivisionBias * h / radius);
        if (cand < key[v]) {
          key[v] = cand;
          parent[v] = u;
        }
      }
    }
    parents.emplace(e.from, std::move(parent));
  }

  for (const auto& e : coupling.entries) {
    const std::vector<Index>& parent = parents.at(e.from);
    if (parent[e.to] == n) {
      throw ComputationError("no hop chain " + pair_name(e.from, e.to) + " at hop radius " + std::to_string(radius));
    }
    IndexSet path{e.to};
    for (Index v = e.to; v != e.from;) {
      v = parent[v];
      path.push_back(v);
    }
    std::reverse(path.begin(), path.end());
    const double len = path_length(space, path);
    const double d = space(e.from, e.to);
    if (len > d * (1.0 + tol.rel) + tol.abs + 1e-12 * std::max(1.0, d)) {
      throw ComputationError("chain " + pair_name(e.from, e.to) + " has length " + std::to_string(len) +
                             " against distance " + std::to_string(d) + "; the space is not geodesic enough here");
    }
    plan.chains.push_back({e.from, e.to, std::move(path), len});
  }
  return plan;
}

Index chain_point(const QuasiMetricSpace& space, const Chain& chain, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("interpolation time outside [0, 1]");
  if (chain.path.size() == 1) return chain.path.front();
  const double target = t * chain.length;
  Index best = chain.path.front();
  double best_gap = target;
  double acc = 0.0;
  for (std::size_t k = 1; k < chain.path.size(); ++k) {
    acc += space(chain.path[k - 1], chain.path[k]);
    const double gap = std::abs(acc - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = chain.path[k];
    }
  }
  if (t == 1.0) return chain.path.back();
  return best;
}

Interpolation interpolate(const QuasiMetricSpace& space, const DynamicalPlan& plan, std::span<const double> ts) {
  Interpolation out;
  for (double t : ts) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("interpolation time outside [0, 1]");
    out.ts.push_back(t);
    if (t == 0.0) {
      out.measures.push_back(plan.mu);
    } else if (t == 1.0) {
      out.measures.push_back(plan.nu);
    } else {
      std::vector<double> m(space.size(), 0.0);
      for (std::size_t k = 0; k < plan.chains.size(); ++k)
        m[chain_point(space, plan.chains[k], t)] += plan.coupling.entries[k].mass;
      out.measures.push_back(std::move(m));
    }
  }
  return out;
}

GeodesyReport geodesy_check(const QuasiMetricSpace& space, const Interpolation& interp, double p) {
  if (interp.ts.size() < 2) throw DomainError("geodesy check needs at least two times");
  const double w01 = wasserstein_distance(space, interp.measures.front(), interp.measures.back(), p);
  GeodesyReport r{0.0, 0.0, interp.ts.front(), interp.ts.back(), w01};
  for (std::size_t a = 0; a < interp.ts.size(); ++a) {
    for (std::size_t b = a + 1; b < interp.ts.size(); ++b) {
      const double s = interp.ts[a], t = interp.ts[b];
      if (!(s < t)) continue;
      const double w = wasserstein_distance(space, interp.measures[a], interp.measures[b], p);
      const double res = std::abs(w - (t - s) * w01);
      if (res > r.abs_residual) {
        r.abs_residual = res;
        r.worst_s = s;
        r.worst_t = t;
      }
    }
  }
  r.rel_residual = w01 > 0.0 ? r.abs_residual / w01 : r.abs_residual;
  return r;
}

}  // namespace qms::transport
