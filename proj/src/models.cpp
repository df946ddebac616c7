#include "qms/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "qms/error.hpp"
#include "qms/quadrature.hpp"

namespace qms::models {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return dot(a, a); }

void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StructureError("points have different dimensions");
}

void require_interior(std::span<const double> x) {
  if (!(norm2(x) < 1.0)) throw DomainError("point is not inside the open unit ball");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t SplitMix::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// ---------------------------------------------------------------------------

std::string model_name(const Model& model) {
  return std::visit(Overloaded{[](const FunkBall&) { return std::string("funk"); },
                               [](const RandersTorus&) { return std::string("randers-torus"); },
                               [](const RandersBall&) { return std::string("randers-ball"); },
                               [](const EuclideanBox&) { return std::string("euclidean"); }},
                    model);
}

int model_dim(const Model& model) {
  return std::visit(Overloaded{[](const FunkBall& m) { return m.dim; }, [](const RandersTorus& m) { return m.dim; },
                               [](const RandersBall& m) { return m.dim(); },
                               [](const EuclideanBox& m) { return m.dim; }},
                    model);
}

void check_model(const Model& model) {
  std::visit(Overloaded{[](const FunkBall& m) {
                          if (m.dim < 1) throw DomainError("funk: dim must be >= 1");
                        },
                        [](const RandersTorus& m) {
                          if (m.dim < 1) throw DomainError("randers-torus: dim must be >= 1");
                          if (!(m.b >= 0.0 && m.b < 1.0)) throw DomainError("randers-torus: b must lie in [0, 1)");
                        },
                        [](const RandersBall& m) {
                          if (m.drift.empty()) throw DomainError("randers-ball: drift vector is empty");
                          if (!(norm2(m.drift) < 1.0)) throw DomainError("randers-ball: |a| must be < 1");
                        },
                        [](const EuclideanBox& m) {
                          if (m.dim < 1) throw DomainError("euclidean: dim must be >= 1");
                          if (!(m.side > 0.0)) throw DomainError("euclidean: side must be positive");
                        }},
             model);
}

// --- Funk --------------------------------------------------------------------

double funk_norm(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x, y);
  require_interior(x);
  const double xx = norm2(x), yy = norm2(y), xy = dot(x, y);
  const double denom = 1.0 - xx;
  const double radicand = std::max(0.0, yy - (xx * yy - xy * xy));
  return (std::sqrt(radicand) + xy) / denom;
}

double funk_distance(std::span<const double> x1, std::span<const double> x2) {
  require_same_dim(x1, x2);
  require_interior(x1);
  require_interior(x2);
  double len2 = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) len2 += (x2[i] - x1[i]) * (x2[i] - x1[i]);
  if (len2 == 0.0) return 0.0;
  const double len = std::sqrt(len2);
  // distance tau from x1 to the unit sphere along e = (x2 - x1)/len
  double c = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) c += x1[i] * (x2[i] - x1[i]);
  c /= len;
  const double slack = 1.0 - norm2(x1);
  const double root = std::sqrt(c * c + slack);
  const double tau = c > 0.0 ? slack / (c + root) : root - c;
  return -std::log1p(-len / tau);
}

double funk_ball_reversibility(double r) { return 2.0 * std::exp(r) - 1.0; }

double funk_ball_euclidean_radius(double r) { return -std::expm1(-r); }

// --- Randers torus -----------------------------------------------------------

double randers_torus_distance(const RandersTorus& model, std::span<const double> p, std::span<const double> q) {
  require_same_dim(p, q);
  if (p.size() != static_cast<std::size_t>(model.dim)) throw StructureError("randers-torus: point dimension mismatch");
  // nearest image on every axis but the first
  double rest2 = 0.0;
  for (std::size_t j = 1; j < p.size(); ++j) {
    double w = q[j] - p[j];
    w -= kTwoPi * std::round(w / kTwoPi);
    rest2 += w * w;
  }
  // sqrt(w^2 + R^2) + b w is convex in w; the lattice minimum brackets the continuous one
  const double b = model.b;
  const double wstar = -b * std::sqrt(rest2) / std::sqrt(1.0 - b * b);
  const double delta = q[0] - p[0];
  const double k0 = std::floor((wstar - delta) / kTwoPi);
  double best = std::numeric_limits<double>::infinity();
  for (double k = k0 - 1.0; k <= k0 + 2.0; k += 1.0) {
    const double w = delta + kTwoPi * k;
    best = std::min(best, std::sqrt(w * w + rest2) + b * w);
  }
  return std::max(best, 0.0);
}

double randers_torus_reversibility(const RandersTorus& model) { return (1.0 + model.b) / (1.0 - model.b); }

// --- Randers ball ------------------------------------------------------------

double randers_ball_norm(const RandersBall& model, std::span<const double> x, std::span<const double> y) {
  require_same_dim(x, y);
  if (x.size() != model.drift.size()) throw StructureError("randers-ball: point dimension mismatch");
  return funk_norm(x, y) + dot(model.drift, y) / (1.0 + dot(model.drift, x));
}

double randers_ball_distance(const RandersBall& model, std::span<const double> p, std::span<const double> q,
                             double abs_tol) {
  require_same_dim(p, q);
  require_interior(p);
  require_interior(q);
  if (p.size() != model.drift.size()) throw StructureError("randers-ball: point dimension mismatch");
  const std::size_t n = p.size();
  Point u(n), x(n);
  bool same = true;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = q[i] - p[i];
    same = same && u[i] == 0.0;
  }
  if (same) return 0.0;
  auto integrand = [&](double s) {
    for (std::size_t i = 0; i < n; ++i) x[i] = p[i] + s * u[i];
    return randers_ball_norm(model, x, u);
  };
  return std::max(0.0, integrate(integrand, 0.0, 1.0, abs_tol).value);
}

double randers_ball_theta(double r) {
  if (!(r > 0.0)) return 1.0;
  const double er = std::exp(r);
  const double rho = (er - 1.0) / (er - 0.5);
  const double a = 3.0 * (1.0 - rho * rho) / ((2.0 + rho) * (2.0 + rho));
  const double s = std::sqrt(1.0 - a);
  return (1.0 + s) / (1.0 - s);
}

RandersBall randers_ball_member(int dim, int i) {
  if (dim < 1 || i < 1) throw DomainError("randers ball member needs dim >= 1 and i >= 1");
  RandersBall m;
  m.drift.assign(static_cast<std::size_t>(dim), 0.0);
  m.drift[0] = 1.0 / (static_cast<double>(i) * i + 1.0);
  return m;
}

// --- dispatch ----------------------------------------------------------------

double distance(const Model& model, std::span<const double> p, std::span<const double> q) {
  return std::visit(Overloaded{[&](const FunkBall&) { return funk_distance(p, q); },
                               [&](const RandersTorus& m) { return randers_torus_distance(m, p, q); },
                               [&](const RandersBall& m) { return randers_ball_distance(m, p, q); },
                               [&](const EuclideanBox&) {
                                 require_same_dim(p, q);
                                 double s = 0.0;
                                 for (std::size_t i = 0; i < p.size(); ++i) s += (q[i] - p[i]) * (q[i] - p[i]);
                                 return std::sqrt(s);
                               }},
                    model);
}

// --- sampling ----------------------------------------------------------------

void check_spec(const SampleSpec& spec) {
  switch (spec.strategy) {
    case SampleStrategy::grid:
      if (!(spec.pitch > 0.0)) throw DomainError("grid pitch must be positive");
      break;
    case SampleStrategy::radial_shells:
      if (spec.shells < 1 || spec.directions < 1) throw DomainError("radial shells need shells >= 1, directions >= 1");
      break;
    case SampleStrategy::seeded_uniform:
      if (spec.count < 2) throw DomainError("seeded sampling needs count >= 2");
      break;
  }
  if (spec.clip_radius && !(*spec.clip_radius > 0.0)) throw DomainError("clip radius must be positive");
  if (spec.max_norm && !(*spec.max_norm > 0.0 && *spec.max_norm < 1.0)) throw DomainError("max_norm must lie in (0, 1)");
}

namespace {

bool is_ball_model(const Model& m) {
  return std::holds_alternative<FunkBall>(m) || std::holds_alternative<RandersBall>(m);
}

double unit_ball_volume(int dim) {
  const double n = dim;
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

// Integer lattice points k with |k| <= kmax per axis, first axis slowest.
template <class Visit>
void for_each_lattice(int dim, long kmin, long kmax, Visit&& visit) {
  std::vector<long> k(static_cast<std::size_t>(dim), kmin);
  while (true) {
    visit(k);
    int axis = dim - 1;
    while (axis >= 0 && k[static_cast<std::size_t>(axis)] == kmax) {
      k[static_cast<std::size_t>(axis)] = kmin;
      --axis;
    }
    if (axis < 0) break;
    ++k[static_cast<std::size_t>(axis)];
  }
}

struct RawSample {
  std::vector<Point> points;
  std::vector<double> cell;  // Euclidean cell volume per point
  std::optional<Index> basepoint;
};

RawSample ball_grid(int dim, double h) {
  RawSample s;
  const long kmax = static_cast<long>(std::floor(1.0 / h + 1e-9));
  const double vol = std::pow(h, dim);
  for_each_lattice(dim, -kmax, kmax, [&](const std::vector<long>& k) {
    Point x(k.size());
    bool origin = true;
    for (std::size_t i = 0; i < k.size(); ++i) {
      x[i] = static_cast<double>(k[i]) * h;
      origin = origin && k[i] == 0;
    }
    if (norm2(x) < 1.0 - 1e-12) {
      if (origin) s.basepoint = s.points.size();
      s.points.push_back(std::move(x));
      s.cell.push_back(vol);
    }
  });
  return s;
}

std::vector<Point> directions(int dim, std::size_t count, std::uint64_t seed) {
  std::vector<Point> dirs;
  if (dim == 1) {
    dirs = {{1.0}, {-1.0}};
    return dirs;
  }
  if (dim == 2) {
    for (std::size_t j = 0; j < count; ++j) {
      const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(count);
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  SplitMix rng(seed);
  for (std::size_t j = 0; j < count; ++j) {
    Point v(static_cast<std::size_t>(dim));
    double n2 = 0.0;
    while (n2 < 1e-12) {
      for (double& c : v) c = rng.normal();
      n2 = norm2(v);
    }
    for (double& c : v) c /= std::sqrt(n2);
    dirs.push_back(std::move(v));
  }
  return dirs;
}

RawSample ball_shells(int dim, const SampleSpec& spec, double radius) {
  RawSample s;
  const auto dirs = directions(dim, spec.directions, spec.seed);
  const double dr = radius / static_cast<double>(spec.shells);
  const double omega = unit_ball_volume(dim);
  s.basepoint = 0;
  s.points.push_back(Point(static_cast<std::size_t>(dim), 0.0));
  s.cell.push_back(omega * std::pow(0.5 * dr, dim));
  for (std::size_t k = 1; k <= spec.shells; ++k) {
    const double rk = dr * static_cast<double>(k);
    const double outer = std::min(radius, rk + 0.5 * dr);
    const double ring = omega * (std::pow(outer, dim) - std::pow(rk - 0.5 * dr, dim));
    for (const auto& d : dirs) {
      Point x(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) x[i] = rk * d[i];
      s.points.push_back(std::move(x));
      s.cell.push_back(ring / static_cast<double>(dirs.size()));
    }
  }
  return s;
}

RawSample ball_uniform(int dim, const SampleSpec& spec, double radius) {
  RawSample s;
  SplitMix rng(spec.seed);
  const double vol = unit_ball_volume(dim) * std::pow(radius, dim) / static_cast<double>(spec.count);
  s.basepoint = 0;
  s.points.push_back(Point(static_cast<std::size_t>(dim), 0.0));
  s.cell.push_back(vol);
  while (s.points.size() < spec.count) {
    Point x(static_cast<std::size_t>(dim));
    for (double& c : x) c = rng.uniform(-radius, radius);
    if (norm2(x) < radius * radius && norm2(x) < 1.0 - 1e-12) {
      s.points.push_back(std::move(x));
      s.cell.push_back(vol);
    }
  }
  return s;
}

RawSample box_like(int dim, const SampleSpec& spec, double side, bool periodic) {
  RawSample s;
  s.basepoint = 0;
  if (spec.strategy == SampleStrategy::radial_shells) {
    throw DomainError("radial-shell sampling is only defined for ball models");
  }
  if (spec.strategy == SampleStrategy::grid) {
    long m = 0;
    double h = spec.pitch;
    if (periodic) {
      m = std::max<long>(1, std::lround(side / spec.pitch));
      h = side / static_cast<double>(m);
      m -= 1;
    } else {
      m = static_cast<long>(std::floor(side / spec.pitch + 1e-9));
    }
    const double vol = std::pow(h, dim);
    for_each_lattice(dim, 0, m, [&](const std::vector<long>& k) {
      Point x(k.size());
      for (std::size_t i = 0; i < k.size(); ++i) x[i] = static_cast<double>(k[i]) * h;
      s.points.push_back(std::move(x));
      s.cell.push_back(vol);
    });
    return s;
  }
  SplitMix rng(spec.seed);
  const double vol = std::pow(side, dim) / static_cast<double>(spec.count);
  for (std::size_t j = 0; j < spec.count; ++j) {
    Point x(static_cast<std::size_t>(dim));
    for (double& c : x) c = rng.uniform(0.0, side);
    s.points.push_back(std::move(x));
    s.cell.push_back(vol);
  }
  return s;
}

}  // namespace

QuasiMetricSpace space_from_points(const Model& model, const std::vector<Point>& points) {
  const std::size_t n = points.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d(i, j) = distance(model, points[i], points[j]);
  return QuasiMetricSpace(std::move(d), {}, points);
}

MeasuredSpace sample(const Model& model, const SampleSpec& spec, WeightModel weights, bool normalize) {
  check_model(model);
  check_spec(spec);
  const int dim = model_dim(model);
  RawSample raw;
  if (is_ball_model(model)) {
    double radius = 0.99;
    if (spec.max_norm) {
      radius = *spec.max_norm;
    } else if (spec.clip_radius && std::holds_alternative<FunkBall>(model)) {
      radius = funk_ball_euclidean_radius(*spec.clip_radius);
    }
    switch (spec.strategy) {
      case SampleStrategy::grid: raw = ball_grid(dim, spec.pitch); break;
      case SampleStrategy::radial_shells: raw = ball_shells(dim, spec, radius); break;
      case SampleStrategy::seeded_uniform: raw = ball_uniform(dim, spec, radius); break;
    }
  } else if (const auto* torus = std::get_if<RandersTorus>(&model)) {
    raw = box_like(torus->dim, spec, kTwoPi, true);
  } else {
    const auto& box = std::get<EuclideanBox>(model);
    raw = box_like(box.dim, spec, box.side, false);
  }

  if (spec.clip_radius) {
    if (!raw.basepoint) throw DomainError("clipping needs a basepoint in the sample");
    const Point star = raw.points[*raw.basepoint];
    const double r = *spec.clip_radius;
    RawSample kept;
    for (std::size_t i = 0; i < raw.points.size(); ++i) {
      if (distance(model, star, raw.points[i]) <= r * (1.0 + 1e-12) + 1e-12) {
        if (i == *raw.basepoint) kept.basepoint = kept.points.size();
        kept.points.push_back(raw.points[i]);
        kept.cell.push_back(raw.cell[i]);
      }
    }
    raw = std::move(kept);
  }
  if (raw.points.size() < 2) throw DomainError("fewer than 2 points remain after sampling/clipping");

  QuasiMetricSpace space = space_from_points(model, raw.points);
  std::vector<double> w = raw.cell;
  if (weights == WeightModel::uniform) std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
  MeasuredSpace out(std::move(space), std::move(w), raw.basepoint);
  return normalize ? out.normalized() : out;
}

MeasuredSpace rescale(const MeasuredSpace& mspace, double k) {
  if (!(k > 0.0)) throw DomainError("rescale factor must be positive");
  const std::size_t n = mspace.size();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = k * mspace.space(i, j);
  return MeasuredSpace(QuasiMetricSpace(std::move(d), mspace.space.labels(), mspace.space.coords()), mspace.weights,
                       mspace.basepoint);
}

MeasuredSpace gaussian_line(double K, double half_width, double pitch) {
  if (!(pitch > 0.0)) throw DomainError("gaussian_line: pitch must be positive");
  if (!(half_width > 0.0)) throw DomainError("gaussian_line: half width must be positive");
  if (!(K >= 0.0)) throw DomainError("gaussian_line: K must be nonnegative");
  const long kmax = static_cast<long>(std::floor(half_width / pitch + 1e-9));
  std::vector<Point> pts;
  std::vector<double> w;
  for (long k = -kmax; k <= kmax; ++k) {
    const double x = static_cast<double>(k) * pitch;
    pts.push_back({x});
    w.push_back(std::exp(-0.5 * K * x * x) * pitch);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  auto space = space_from_points(EuclideanBox{1, 2.0 * half_width}, pts);
  return MeasuredSpace(std::move(space), std::move(w), static_cast<Index>(kmax));
}

}  // namespace qms::models
