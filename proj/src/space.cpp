#include "qms/space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "qms/error.hpp"

namespace qms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_index(const QuasiMetricSpace& space, Index i, const char* what) {
  if (i >= space.size()) {
    throw StructureError(std::string(what) + " index " + std::to_string(i) + " out of range for " +
                         std::to_string(space.size()) + " points");
  }
}

}  // namespace

QuasiMetricSpace::QuasiMetricSpace(Matrix dist, std::vector<std::string> labels,
                                   std::vector<std::vector<double>> coords)
    : dist_(std::move(dist)), labels_(std::move(labels)), coords_(std::move(coords)) {
  if (!dist_.square()) {
    throw StructureError("distance matrix is " + std::to_string(dist_.rows()) + "x" +
                         std::to_string(dist_.cols()) + ", expected square");
  }
  for (double v : dist_.data()) {
    if (!std::isfinite(v)) throw StructureError("distance matrix has a non-finite entry");
  }
  if (!labels_.empty() && labels_.size() != size()) {
    throw StructureError("labels length does not match point count");
  }
  if (!coords_.empty() && coords_.size() != size()) {
    throw StructureError("coords length does not match point count");
  }
}

QuasiMetricSpace QuasiMetricSpace::restrict_to(std::span<const Index> points) const {
  Matrix d(points.size(), points.size());
  std::vector<std::string> labels;
  std::vector<std::vector<double>> coords;
  for (std::size_t a = 0; a < points.size(); ++a) {
    check_index(*this, points[a], "point");
    for (std::size_t b = 0; b < points.size(); ++b) d(a, b) = dist_(points[a], points[b]);
    if (!labels_.empty()) labels.push_back(labels_[points[a]]);
    if (!coords_.empty()) coords.push_back(coords_[points[a]]);
  }
  return QuasiMetricSpace(std::move(d), std::move(labels), std::move(coords));
}

QuasiMetricSpace QuasiMetricSpace::permuted(std::span<const Index> perm) const {
  if (perm.size() != size()) throw StructureError("permutation length does not match point count");
  return restrict_to(perm);
}

MeasuredSpace::MeasuredSpace(QuasiMetricSpace s, std::vector<double> w, std::optional<Index> star)
    : space(std::move(s)), weights(std::move(w)), basepoint(star) {
  if (weights.size() != space.size()) throw StructureError("weights length does not match point count");
  for (double v : weights) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw StructureError("weights must be finite and nonnegative");
  }
  if (basepoint) check_index(space, *basepoint, "basepoint");
}

double MeasuredSpace::total_mass() const noexcept { return std::accumulate(weights.begin(), weights.end(), 0.0); }

MeasuredSpace MeasuredSpace::normalized() const {
  const double total = total_mass();
  if (!(total > 0.0)) throw DomainError("cannot normalize a zero measure");
  MeasuredSpace out = *this;
  for (double& v : out.weights) v /= total;
  return out;
}

IndexSet MeasuredSpace::support() const {
  IndexSet s;
  for (Index i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) s.push_back(i);
  return s;
}

ThetaBound::ThetaBound(std::vector<std::pair<double, double>> breakpoints) : bp_(std::move(breakpoints)) {
  if (bp_.empty()) throw StructureError("theta bound needs at least one breakpoint");
  for (std::size_t k = 0; k < bp_.size(); ++k) {
    if (bp_[k].second < 1.0) throw DomainError("theta values must be >= 1");
    if (k > 0 && (bp_[k].first <= bp_[k - 1].first || bp_[k].second < bp_[k - 1].second)) {
      throw DomainError("theta breakpoints must have increasing radii and nondecreasing values");
    }
  }
}

double ThetaBound::operator()(double r) const {
  auto it = std::lower_bound(bp_.begin(), bp_.end(), r, [](const auto& p, double x) { return p.first < x; });
  return it == bp_.end() ? bp_.back().second : it->second;
}

ValidationReport validate(const QuasiMetricSpace& space, double tol, std::size_t max_listed) {
  ValidationReport rep;
  const std::size_t n = space.size();
  for (Index i = 0; i < n; ++i) {
    if (space(i, i) != 0.0) rep.nonzero_diagonal.push_back(i);
    for (Index j = 0; j < n; ++j) {
      if (space(i, j) < 0.0) rep.negative.emplace_back(i, j);
      if (i != j && space(i, j) == 0.0) rep.zero_off_diagonal.emplace_back(i, j);
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double dij = space(i, j);
      for (Index k = 0; k < n; ++k) {
        const double excess = space(i, k) - dij - space(j, k);
        if (excess > tol) {
          ++rep.triangle_count;
          if (rep.triangle.size() < max_listed) {
            rep.triangle.push_back({i, j, k, excess});
          } else {
            rep.truncated = true;
          }
        }
      }
    }
  }
  rep.valid = rep.triangle_count == 0 && rep.zero_off_diagonal.empty() && rep.negative.empty() &&
              rep.nonzero_diagonal.empty();
  return rep;
}

double reversibility(const QuasiMetricSpace& space, std::span<const Index> subset) {
  if (subset.empty()) throw DomainError("reversibility of an empty subset");
  double best = 1.0;
  for (Index x : subset) {
    check_index(space, x, "subset");
    for (Index y : subset) {
      if (x == y) continue;
      const double fwd = space(x, y);
      const double bwd = space(y, x);
      if (bwd <= 0.0) {
        if (fwd > 0.0) return kInf;
        continue;
      }
      best = std::max(best, fwd / bwd);
    }
  }
  return best;
}

double reversibility(const QuasiMetricSpace& space) {
  IndexSet all(space.size());
  std::iota(all.begin(), all.end(), Index{0});
  return reversibility(space, all);
}

QuasiMetricSpace symmetrize(const QuasiMetricSpace& space) {
  const std::size_t n = space.size();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double m = 0.5 * (space(i, j) + space(j, i));
      d(i, j) = m;
      d(j, i) = m;
    }
  }
  return QuasiMetricSpace(std::move(d), space.labels(), space.coords());
}

IndexSet ball(const QuasiMetricSpace& space, const BallSpec& spec) {
  check_index(space, spec.center, "ball center");
  if (spec.radius < 0.0) throw DomainError("ball radius must be nonnegative");
  IndexSet out;
  for (Index y = 0; y < space.size(); ++y) {
    const double d = spec.orientation == Orientation::forward ? space(spec.center, y) : space(y, spec.center);
    if (spec.closed ? d <= spec.radius : d < spec.radius) out.push_back(y);
  }
  return out;
}

double diameter(const QuasiMetricSpace& space) {
  double best = 0.0;
  for (double v : space.dist().data()) best = std::max(best, v);
  return best;
}

double diameter(const QuasiMetricSpace& space, std::span<const Index> subset) {
  double best = 0.0;
  for (Index x : subset)
    for (Index y : subset) best = std::max(best, space(x, y));
  return best;
}

double path_length(const QuasiMetricSpace& space, std::span<const Index> path) {
  if (path.empty()) throw DomainError("path_length of an empty path");
  double total = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    check_index(space, path[k], "path");
    if (k > 0) total += space(path[k - 1], path[k]);
  }
  return total;
}

QuasiMetricSpace induced_length_metric(const QuasiMetricSpace& space, double neighbor_radius) {
  const std::size_t n = space.size();
  Matrix d(n, n, kInf);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = 0; j < n; ++j)
      if (i != j && space(i, j) < neighbor_radius) d(i, j) = space(i, j);
  }
  // Floyd-Warshall
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == kInf) continue;
      auto row_i = d.row(i);
      auto row_k = d.row(k);
      for (Index j = 0; j < n; ++j) row_i[j] = std::min(row_i[j], dik + row_k[j]);
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (d(i, j) == kInf) {
        throw ComputationError("hop graph is not strongly connected: no chain from point " + std::to_string(i) +
                               " to point " + std::to_string(j));
      }
    }
  }
  return QuasiMetricSpace(std::move(d), space.labels(), space.coords());
}

MidpointDefect midpoint_defect(const QuasiMetricSpace& space, Index x, Index y) {
  check_index(space, x, "x");
  check_index(space, y, "y");
  const double half = 0.5 * space(x, y);
  MidpointDefect best{kInf, x};
  for (Index z = 0; z < space.size(); ++z) {
    const double defect = std::max(std::abs(space(x, z) - half), std::abs(space(z, y) - half));
    if (defect < best.defect) best = {defect, z};
  }
  return best;
}

// ---------------------------------------------------------------------------
// covering and packing

namespace {

using Mask = std::uint32_t;

// conflict[p] has bit q set when some open forward r-ball centred in the space contains p and q
// (covering relation), or when the open forward r-balls at p and q intersect (packing relation).
std::vector<std::vector<bool>> co_coverable(const QuasiMetricSpace& s, double r) {
  const std::size_t n = s.size();
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (Index c = 0; c < n; ++c) {
    IndexSet members;
    for (Index p = 0; p < n; ++p)
      if (s(c, p) < r) members.push_back(p);
    for (Index p : members)
      for (Index q : members) rel[p][q] = true;
  }
  return rel;
}

std::vector<std::vector<bool>> balls_intersect(const QuasiMetricSpace& s, double r) {
  const std::size_t n = s.size();
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (Index z = 0; z < n; ++z) {
    IndexSet centres;
    for (Index p = 0; p < n; ++p)
      if (s(p, z) < r) centres.push_back(p);
    for (Index p : centres)
      for (Index q : centres) rel[p][q] = true;
  }
  return rel;
}

// Greedy independent set (min-degree first); a certified lower bound on the maximum.
std::size_t greedy_independent(const std::vector<std::vector<bool>>& rel) {
  const std::size_t n = rel.size();
  std::vector<std::size_t> degree(n, 0);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q)
      if (p != q && rel[p][q]) ++degree[p];
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return degree[a] < degree[b]; });
  IndexSet chosen;
  for (Index p : order) {
    bool ok = true;
    for (Index q : chosen) ok = ok && !rel[p][q];
    if (ok) chosen.push_back(p);
  }
  return chosen.size();
}

// Greedy clique partition; an independent set meets each clique at most once.
std::size_t greedy_clique_partition(const std::vector<std::vector<bool>>& rel) {
  std::vector<IndexSet> cliques;
  for (Index p = 0; p < rel.size(); ++p) {
    bool placed = false;
    for (auto& c : cliques) {
      bool all = true;
      for (Index q : c) all = all && rel[p][q];
      if (all) {
        c.push_back(p);
        placed = true;
        break;
      }
    }
    if (!placed) cliques.push_back({p});
  }
  return cliques.size();
}

std::size_t exact_max_independent(const std::vector<std::vector<bool>>& rel) {
  const std::size_t n = rel.size();
  std::vector<Mask> adj(n, 0);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q)
      if (p != q && rel[p][q]) adj[p] |= Mask{1} << q;
  std::size_t best = 0;
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    const auto size = static_cast<std::size_t>(std::popcount(m));
    if (size <= best) continue;
    bool ok = true;
    for (Index p = 0; p < n && ok; ++p)
      if ((m >> p) & 1U) ok = (adj[p] & m) == 0;
    if (ok) best = size;
  }
  return best;
}

}  // namespace

CountBounds covering_number(const QuasiMetricSpace& space, double eps) {
  if (!(eps > 0.0)) throw DomainError("covering radius must be positive");
  const std::size_t n = space.size();
  if (n == 0) return {0, 0, true};
  std::vector<Mask> covers;
  std::vector<std::vector<bool>> covered_by(n, std::vector<bool>(n, false));
  for (Index c = 0; c < n; ++c)
    for (Index p = 0; p < n; ++p) covered_by[c][p] = space(c, p) < eps;

  if (n <= kExactCoverLimit) {
    covers.resize(n, 0);
    for (Index c = 0; c < n; ++c)
      for (Index p = 0; p < n; ++p)
        if (covered_by[c][p]) covers[c] |= Mask{1} << p;
    const Mask full = (Mask{1} << n) - 1;
    std::size_t best = n;
    for (Mask m = 1; m <= full; ++m) {
      const auto size = static_cast<std::size_t>(std::popcount(m));
      if (size >= best) continue;
      Mask u = 0;
      for (Index c = 0; c < n; ++c)
        if ((m >> c) & 1U) u |= covers[c];
      if (u == full) best = size;
    }
    return {best, best, true};
  }

  // greedy set cover for the upper bound
  std::vector<bool> done(n, false);
  std::size_t remaining = n, used = 0;
  while (remaining > 0) {
    Index best_c = 0;
    std::size_t best_gain = 0;
    for (Index c = 0; c < n; ++c) {
      std::size_t gain = 0;
      for (Index p = 0; p < n; ++p) gain += (!done[p] && covered_by[c][p]) ? 1 : 0;
      if (gain > best_gain) {
        best_gain = gain;
        best_c = c;
      }
    }
    for (Index p = 0; p < n; ++p) {
      if (!done[p] && covered_by[best_c][p]) {
        done[p] = true;
        --remaining;
      }
    }
    ++used;
  }
  const std::size_t lower = greedy_independent(co_coverable(space, eps));
  return {lower, used, lower == used};
}

CountBounds capacity(const QuasiMetricSpace& space, double eps) {
  if (!(eps > 0.0)) throw DomainError("capacity radius must be positive");
  const std::size_t n = space.size();
  if (n == 0) return {0, 0, true};
  const auto rel = balls_intersect(space, 0.5 * eps);
  if (n <= kExactCoverLimit) {
    const std::size_t v = exact_max_independent(rel);
    return {v, v, true};
  }
  const std::size_t lower = greedy_independent(rel);
  const std::size_t upper = greedy_clique_partition(rel);
  return {lower, upper, lower == upper};
}

CoveringSandwich covering_sandwich(const QuasiMetricSpace& space, double eps) {
  CoveringSandwich s{};
  s.eps = eps;
  s.theta = reversibility(space);
  s.cap_2eps = capacity(space, 2.0 * eps);
  s.cov_eps = covering_number(space, eps);
  s.cap_eps_over_theta = capacity(space, eps / s.theta);
  s.cap_2theta_eps = capacity(space, 2.0 * s.theta * eps);
  s.reversible_form_holds = s.cap_2eps.lower <= s.cov_eps.upper && s.cov_eps.lower <= s.cap_eps_over_theta.upper;
  s.theta_form_holds = s.cap_2theta_eps.lower <= s.cov_eps.upper && s.cov_eps.lower <= s.cap_eps_over_theta.upper;
  return s;
}

DoublingResult doubling_constant(const MeasuredSpace& mspace, std::span<const double> radii) {
  DoublingResult res;
  const auto& s = mspace.space;
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("doubling radii must be positive");
    for (Index x = 0; x < s.size(); ++x) {
      double small = 0.0, big = 0.0;
      for (Index y = 0; y < s.size(); ++y) {
        const double d = s(x, y);
        if (d <= r) small += mspace.weights[y];
        if (d <= 2.0 * r) big += mspace.weights[y];
      }
      if (small <= 0.0) {
        if (big > 0.0 && !res.infinite) {
          res = {kInf, x, r, true};
        }
        continue;
      }
      if (!res.infinite && big / small > res.value) res = {big / small, x, r, false};
    }
  }
  return res;
}

}  // namespace qms
