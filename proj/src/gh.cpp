#include "qms/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "maxflow.hpp"
#include "qms/error.hpp"
#include "qms/models.hpp"

namespace qms::gh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_map(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const PointMap& f) {
  if (f.size() != x.size()) throw StructureError("map does not assign every source point");
  for (Index t : f.assignment)
    if (t >= y.size()) throw StructureError("map target index out of range");
}

// Objective used by local search: the defect, then the sum of squares as a tie-breaker.
struct Score {
  double defect;
  double spread;
  bool better_than(const Score& o) const {
    if (defect < o.defect - 1e-15) return true;
    return defect <= o.defect + 1e-15 && spread < o.spread - 1e-15;
  }
};

Score score(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const std::vector<Index>& f) {
  double dis = 0.0, spread = 0.0;
  for (Index a = 0; a < x.size(); ++a) {
    for (Index b = 0; b < x.size(); ++b) {
      const double e = std::abs(y(f[a], f[b]) - x(a, b));
      dis = std::max(dis, e);
      spread += e * e;
    }
  }
  double cov = 0.0;
  for (Index t = 0; t < y.size(); ++t) {
    double m = kInf;
    for (Index a = 0; a < x.size(); ++a) m = std::min(m, y(f[a], t));
    cov = std::max(cov, m);
    spread += m * m;
  }
  return {std::max(dis, cov), spread};
}

IsoDefect local_search(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const IsoDefectOptions& opts) {
  const std::size_t m = x.size(), k = y.size();
  std::vector<Index> best_map;
  Score best{kInf, kInf};
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    models::SplitMix rng(opts.seed * 0x9e3779b97f4a7c15ULL + r);
    std::vector<Index> f(m);
    for (auto& t : f) t = static_cast<Index>(rng.next() % k);
    Score cur = score(x, y, f);
    const std::size_t iters = opts.iterations_per_point * m;
    for (std::size_t it = 0; it < iters; ++it) {
      std::vector<Index> g = f;
      if (m >= 2 && rng.next() % 4 == 0) {
        const Index a = static_cast<Index>(rng.next() % m);
        const Index b = static_cast<Index>(rng.next() % m);
        std::swap(g[a], g[b]);
      } else {
        g[static_cast<Index>(rng.next() % m)] = static_cast<Index>(rng.next() % k);
      }
      const Score s = score(x, y, g);
      if (s.better_than(cur)) {
        f = std::move(g);
        cur = s;
      }
    }
    if (cur.better_than(best)) {
      best = cur;
      best_map = f;
    }
  }
  return {best.defect, PointMap{best_map}, true};
}

// Exact minimum by depth-first assignment with pruning on the partial distortion.
class BranchAndBound {
 public:
  BranchAndBound(const QuasiMetricSpace& x, const QuasiMetricSpace& y, double incumbent, std::vector<Index> map)
      : x_(x), y_(y), best_(incumbent), best_map_(std::move(map)), f_(x.size()) {}

  void run() { descend(0, 0.0); }
  [[nodiscard]] double best() const { return best_; }
  [[nodiscard]] const std::vector<Index>& best_map() const { return best_map_; }

 private:
  void descend(Index depth, double partial) {
    if (depth == x_.size()) {
      double cov = 0.0;
      for (Index t = 0; t < y_.size() && cov < best_; ++t) {
        double m = kInf;
        for (Index a = 0; a < x_.size(); ++a) m = std::min(m, y_(f_[a], t));
        cov = std::max(cov, m);
      }
      const double total = std::max(partial, cov);
      if (total < best_) {
        best_ = total;
        best_map_ = f_;
      }
      return;
    }
    for (Index t = 0; t < y_.size(); ++t) {
      double worst = partial;
      for (Index a = 0; a < depth && worst < best_; ++a) {
        worst = std::max(worst, std::abs(y_(f_[a], t) - x_(a, depth)));
        worst = std::max(worst, std::abs(y_(t, f_[a]) - x_(depth, a)));
      }
      if (worst >= best_) continue;
      f_[depth] = t;
      descend(depth + 1, worst);
    }
  }

  const QuasiMetricSpace& x_;
  const QuasiMetricSpace& y_;
  double best_;
  std::vector<Index> best_map_;
  std::vector<Index> f_;
};

bool within_limit(std::size_t base, std::size_t exponent, std::uint64_t limit) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (v > limit / std::max<std::uint64_t>(base, 1)) return false;
    v *= base;
  }
  return v <= limit;
}

}  // namespace

double distortion(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const PointMap& f) {
  check_map(x, y, f);
  double dis = 0.0;
  for (Index a = 0; a < x.size(); ++a)
    for (Index b = 0; b < x.size(); ++b) dis = std::max(dis, std::abs(y(f(a), f(b)) - x(a, b)));
  return dis;
}

double covering_defect(const QuasiMetricSpace& y, const PointMap& f) {
  if (f.size() == 0) throw StructureError("empty map has no image");
  double cov = 0.0;
  for (Index t = 0; t < y.size(); ++t) {
    double m = kInf;
    for (Index s : f.assignment) m = std::min(m, y(s, t));
    cov = std::max(cov, m);
  }
  return cov;
}

double isometry_defect(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const PointMap& f) {
  return std::max(distortion(x, y, f), covering_defect(y, f));
}

HausdorffResult hausdorff(const QuasiMetricSpace& space, std::span<const Index> a, std::span<const Index> b) {
  if (a.empty() || b.empty()) throw DomainError("hausdorff distance of an empty set");
  for (Index i : a)
    if (i >= space.size()) throw StructureError("set index out of range");
  for (Index i : b)
    if (i >= space.size()) throw StructureError("set index out of range");
  auto excess = [&](std::span<const Index> from, std::span<const Index> into) {
    // max over p in `into` of min over q in `from` of d(q, p)
    double worst = 0.0;
    for (Index p : into) {
      double m = kInf;
      for (Index q : from) m = std::min(m, space(q, p));
      worst = std::max(worst, m);
    }
    return worst;
  };
  const double a_in_b = excess(b, a);
  const double b_in_a = excess(a, b);
  return {std::max(a_in_b, b_in_a), a_in_b, b_in_a};
}

IsoDefect iso_defect(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const IsoDefectOptions& opts) {
  if (x.size() == 0 || y.size() == 0) throw DomainError("iso_defect needs nonempty spaces");
  const bool exact = !opts.force_local_search && within_limit(y.size(), x.size(), opts.exhaustive_limit);
  if (!exact) return local_search(x, y, opts);

  IsoDefectOptions quick = opts;
  quick.restarts = 1;
  IsoDefect seed = local_search(x, y, quick);
  BranchAndBound bb(x, y, seed.value, seed.map.assignment);
  bb.run();
  return {bb.best(), PointMap{bb.best_map()}, false};
}

GhBracket gh_bracket(const QuasiMetricSpace& x, const QuasiMetricSpace& y, double theta,
                     const IsoDefectOptions& opts) {
  const double needed = std::max(reversibility(x), reversibility(y));
  if (theta < needed * (1.0 - 1e-12)) {
    throw DomainError("theta " + std::to_string(theta) + " is below the reversibility " + std::to_string(needed) +
                      "; no theta-admissible gluing exists");
  }
  const IsoDefect xy = iso_defect(x, y, opts);
  const IsoDefect yx = iso_defect(y, x, opts);
  const bool use_xy = xy.value <= yx.value;
  const double m = use_xy ? xy.value : yx.value;
  return {m / (1.0 + theta), 2.0 * m, theta, use_xy ? xy.map : yx.map, use_xy, xy.heuristic || yx.heuristic};
}

double prokhorov(const QuasiMetricSpace& space, std::span<const double> mu, std::span<const double> nu) {
  const std::size_t n = space.size();
  if (mu.size() != n || nu.size() != n) throw StructureError("measure length does not match point count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mu[i] >= 0.0) || !(nu[i] >= 0.0)) throw DomainError("measures must be nonnegative");
  }
  std::vector<Index> mu_atoms, nu_atoms;
  double mu_total = 0.0, nu_total = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (mu[i] > 0.0) mu_atoms.push_back(i);
    if (nu[i] > 0.0) nu_atoms.push_back(i);
    mu_total += mu[i];
    nu_total += nu[i];
  }

  // sup_A mu(A) - nu(A^eps) where the fattening uses the hops d(a, b) <= level
  auto deficiency = [&](std::span<const double> from, const std::vector<Index>& fa, std::span<const double> to,
                        const std::vector<Index>& ta, double from_total, bool reverse, double level) {
    detail::MaxFlow g(fa.size() + ta.size() + 2);
    const std::size_t s = fa.size() + ta.size(), t = s + 1;
    for (std::size_t i = 0; i < fa.size(); ++i) g.add_edge(s, i, from[fa[i]]);
    for (std::size_t j = 0; j < ta.size(); ++j) g.add_edge(fa.size() + j, t, to[ta[j]]);
    for (std::size_t i = 0; i < fa.size(); ++i) {
      for (std::size_t j = 0; j < ta.size(); ++j) {
        const double d = reverse ? space(ta[j], fa[i]) : space(fa[i], ta[j]);
        if (d <= level) g.add_edge(i, fa.size() + j, kInf);
      }
    }
    const double def = from_total - g.run(s, t);
    return def < 1e-12 * std::max(1.0, from_total) ? 0.0 : def;
  };
  auto both = [&](double level) {
    return std::max(deficiency(mu, mu_atoms, nu, nu_atoms, mu_total, false, level),
                    deficiency(nu, nu_atoms, mu, mu_atoms, nu_total, false, level));
  };

  std::vector<double> levels{0.0};
  for (double v : space.dist().data()) levels.push_back(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Feasible eps inside (L_k, L_{k+1}] exist iff D_k <= L_{k+1}; monotone in k.
  const std::size_t top = levels.size() - 1;
  auto upper_of = [&](std::size_t k) { return k == top ? kInf : levels[k + 1]; };
  std::size_t lo = 0, hi = top;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (both(levels[mid]) <= upper_of(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::max(levels[lo], both(levels[lo]));
}

QuasiMetricSpace glue(const QuasiMetricSpace& x, const QuasiMetricSpace& y, const PointMap& f, double eps) {
  check_map(x, y, f);
  const std::size_t m = x.size(), k = y.size();
  Matrix d(m + k, m + k);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) d(a, b) = x(a, b);
  for (Index s = 0; s < k; ++s)
    for (Index t = 0; t < k; ++t) d(m + s, m + t) = y(s, t);
  for (Index a = 0; a < m; ++a) {
    for (Index s = 0; s < k; ++s) {
      double fwd = kInf, bwd = kInf;
      for (Index c = 0; c < m; ++c) {
        fwd = std::min(fwd, x(a, c) + y(f(c), s));
        bwd = std::min(bwd, y(s, f(c)) + x(c, a));
      }
      d(a, m + s) = fwd + eps;
      d(m + s, a) = bwd + eps;
    }
  }
  return QuasiMetricSpace(std::move(d));
}

GhpResult ghp_upper(const MeasuredSpace& x, const MeasuredSpace& y, double theta, const IsoDefectOptions& opts) {
  const double needed = std::max(reversibility(x.space), reversibility(y.space));
  if (theta < needed * (1.0 - 1e-12)) {
    throw DomainError("theta " + std::to_string(theta) + " is below the reversibility " + std::to_string(needed));
  }
  const IsoDefect iso = iso_defect(x.space, y.space, opts);
  const QuasiMetricSpace glued = glue(x.space, y.space, iso.map, iso.value);
  const std::size_t m = x.size(), k = y.size();
  std::vector<Index> xs(m), ys(k);
  for (Index i = 0; i < m; ++i) xs[i] = i;
  for (Index i = 0; i < k; ++i) ys[i] = m + i;
  std::vector<double> mu(m + k, 0.0), nu(m + k, 0.0);
  std::copy(x.weights.begin(), x.weights.end(), mu.begin());
  std::copy(y.weights.begin(), y.weights.end(), nu.begin() + static_cast<std::ptrdiff_t>(m));
  const double dh = hausdorff(glued, xs, ys).value;
  const double dp = prokhorov(glued, mu, nu);
  return {dh + dp, dh, dp, iso.value, reversibility(glued), iso.map, iso.heuristic};
}

}  // namespace qms::gh
