#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "qms/error.hpp"
#include "qms/models.hpp"
#include "qms/space.hpp"

using namespace qms;
using testing_support::from_rows;
using testing_support::random_space;
using testing_support::rows_of;

namespace {
const QuasiMetricSpace two_point = from_rows({{0, 2}, {1, 0}});
}

TEST_CASE("construction rejects malformed matrices") {
  CHECK_THROWS_AS(QuasiMetricSpace(Matrix(2, 3)), StructureError);
  Matrix m(2, 2);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(QuasiMetricSpace{m}, StructureError);
  CHECK_THROWS_AS(MeasuredSpace(two_point, {1.0}), StructureError);
  CHECK_THROWS_AS(MeasuredSpace(two_point, {1.0, -0.5}), StructureError);
}

TEST_CASE("validate") {
  CHECK(validate(two_point).valid);

  const auto bad = from_rows({{0, 1, 5}, {1, 0, 1}, {1, 1, 0}});
  const auto rep = validate(bad);
  CHECK_FALSE(rep.valid);
  REQUIRE(rep.triangle_count == 1);
  CHECK(rep.triangle[0].i == 0);
  CHECK(rep.triangle[0].j == 1);
  CHECK(rep.triangle[0].k == 2);
  CHECK(rep.triangle[0].excess == doctest::Approx(3.0));

  const auto zero = from_rows({{0, 0}, {1, 0}});
  CHECK(validate(zero).zero_off_diagonal.size() == 1);
  const auto diag = from_rows({{1, 1}, {1, 0}});
  CHECK(validate(diag).nonzero_diagonal == std::vector<Index>{0});

  const auto listed = validate(bad, kUserTolerance, 0);
  CHECK(listed.truncated);
  CHECK(listed.triangle_count == 1);
}

TEST_CASE("validate on a sampled Funk ball, exhaustive triple scan") {
  models::SampleSpec spec;
  spec.pitch = 0.15;
  spec.clip_radius = 1.5;
  const auto ms = models::sample(models::FunkBall{2}, spec);
  const auto rep = validate(ms.space, kModelTolerance);
  CHECK(rep.valid);
  // the scan itself, written out
  const auto d = rows_of(ms.space);
  double worst = -1;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      for (std::size_t k = 0; k < d.size(); ++k) worst = std::max(worst, d[i][k] - d[i][j] - d[j][k]);
  CHECK(worst <= kModelTolerance);
}

TEST_CASE("reversibility") {
  CHECK(reversibility(two_point) == 2.0);
  const auto sym = from_rows({{0, 1, 2}, {1, 0, 1.5}, {2, 1.5, 0}});
  CHECK(reversibility(sym) == 1.0);
  const std::vector<Index> single{0};
  CHECK(reversibility(two_point, single) == 1.0);
  CHECK_THROWS_AS(reversibility(two_point, std::vector<Index>{}), DomainError);
}

TEST_CASE("symmetrize") {
  const auto s = symmetrize(two_point);
  CHECK(s(0, 1) == 1.5);
  CHECK(s(1, 0) == 1.5);
  const auto sym = from_rows({{0, 1}, {1, 0}});
  CHECK(symmetrize(sym).dist() == sym.dist());
}

TEST_CASE("balls") {
  const auto s = from_rows({{0, 1, 2}, {3, 0, 1}, {4, 3, 0}});
  CHECK(ball(s, {0, 0.0, Orientation::forward, false}).empty());
  CHECK(ball(s, {0, 0.0, Orientation::forward, true}) == IndexSet{0});
  CHECK(ball(s, {0, diameter(s), Orientation::forward, true}).size() == 3);
  CHECK(ball(s, {0, 2.0, Orientation::forward, false}) == IndexSet{0, 1});
  CHECK(ball(s, {0, 3.5, Orientation::backward, false}) == IndexSet{0, 1});
}

TEST_CASE("diameter and path length") {
  CHECK(diameter(from_rows({{0}})) == 0.0);
  CHECK(diameter(two_point) == 2.0);
  const std::vector<Index> ab{0, 1}, aba{0, 1, 0}, a{0};
  CHECK(path_length(two_point, ab) == 2.0);
  CHECK(path_length(two_point, aba) == 3.0);
  CHECK(path_length(two_point, a) == 0.0);
  CHECK_THROWS_AS(path_length(two_point, std::vector<Index>{}), DomainError);
}

TEST_CASE("Randers torus diameter dominates the reversible diameter (pair scan)") {
  models::SampleSpec spec;
  spec.pitch = 0.8;
  const auto ms = models::sample(models::RandersTorus{2, 0.5}, spec);
  const auto d = rows_of(ms.space);
  double brute = 0;
  for (const auto& row : d)
    for (double v : row) brute = std::max(brute, v);
  CHECK(diameter(ms.space) == brute);
  CHECK(diameter(ms.space) >= diameter(symmetrize(ms.space)));
}

TEST_CASE("induced length metric") {
  const auto line = from_rows({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  const auto wide = induced_length_metric(line, 10.0);
  CHECK(wide.dist() == line.dist());
  const auto hops = from_rows({{0, 1, 1.5}, {1, 0, 1}, {1.5, 1, 0}});
  const auto l = induced_length_metric(hops, 1.2);
  CHECK(l(0, 2) == 2.0);
  CHECK_THROWS_AS(induced_length_metric(line, 0.5), ComputationError);

  models::SplitMix rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = random_space(7, rng);
    const double r = 1.2 + rng.uniform();
    try {
      const auto got = induced_length_metric(s, r);
      const auto want = oracle::floyd(rows_of(s), r);
      for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) {
          CHECK(got(i, j) == doctest::Approx(want[i][j]).epsilon(1e-12));
          CHECK(got(i, j) >= s(i, j) - 1e-12);
        }
    } catch (const ComputationError&) {
      const auto want = oracle::floyd(rows_of(s), r);
      bool unreachable = false;
      for (const auto& row : want)
        for (double v : row) unreachable = unreachable || std::isinf(v);
      CHECK(unreachable);
    }
  }
}

TEST_CASE("midpoint defect") {
  CHECK(midpoint_defect(two_point, 0, 0).defect == 0.0);
  CHECK(midpoint_defect(two_point, 0, 1).defect == doctest::Approx(1.0));

  models::SampleSpec spec;
  spec.pitch = 0.1;
  spec.clip_radius = 1.0;
  const auto ms = models::sample(models::FunkBall{2}, spec);
  // a few pairs across the sample
  for (Index x = 0; x < ms.size(); x += 37)
    for (Index y = 5; y < ms.size(); y += 41) CHECK(midpoint_defect(ms.space, x, y).defect <= 2 * 0.1 * 4.0);
}

TEST_CASE("covering numbers and capacity against exhaustive search") {
  CHECK(covering_number(two_point, 3.0).value() == 1);
  const auto discrete = from_rows({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
  CHECK(covering_number(discrete, 0.5).value() == 4);
  CHECK_THROWS_AS(covering_number(discrete, 0.0), DomainError);

  models::SplitMix rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const auto s = random_space(8, rng);
    const double eps = rng.uniform(0.3, 3.5);
    const auto cov = covering_number(s, eps);
    const auto cap = capacity(s, eps);
    REQUIRE(cov.exact);
    REQUIRE(cap.exact);
    CHECK(cov.value() == oracle::covering_exhaustive(rows_of(s), eps));
    CHECK(cap.value() == oracle::capacity_exhaustive(rows_of(s), eps));
  }
}

TEST_CASE("greedy bounds bracket the count on larger spaces") {
  models::SplitMix rng(5);
  const auto s = random_space(20, rng);
  for (double eps : {0.8, 1.5, 2.5}) {
    const auto cov = covering_number(s, eps);
    const auto cap = capacity(s, eps);
    CHECK(cov.lower <= cov.upper);
    CHECK(cap.lower <= cap.upper);
    CHECK(cov.upper >= 1);
  }
}

TEST_CASE("covering sandwich: the theta form holds where the counts are exact") {
  models::SplitMix rng(3);
  for (int rep = 0; rep < 40; ++rep) {
    const auto s = random_space(7, rng, 0.2, 4.0);
    const auto sw = covering_sandwich(s, rng.uniform(0.3, 3.0));
    CHECK(sw.theta_form_holds);
  }
}

TEST_CASE("reversible covering sandwich can fail for irreversible spaces") {
  // cheap forward spokes from the hub 0, expensive returns: one 1-ball covers, but
  // the open 1-balls at the leaves are singletons and pairwise disjoint.
  const auto star = from_rows({{0, 0.5, 0.5, 0.5}, {3, 0, 3, 3}, {3, 3, 0, 3}, {3, 3, 3, 0}});
  const auto sw = covering_sandwich(star, 1.0);
  CHECK(sw.cov_eps.value() == 1);
  CHECK(sw.cap_2eps.value() == 3);
  CHECK_FALSE(sw.reversible_form_holds);
  CHECK(sw.theta_form_holds);
}

TEST_CASE("doubling constant") {
  const auto discrete = from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const MeasuredSpace ms(discrete, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const std::vector<double> r04{0.4}, r06{0.6};
  CHECK(doubling_constant(ms, r04).value == doctest::Approx(1.0));
  CHECK(doubling_constant(ms, r06).value == doctest::Approx(3.0));

  const MeasuredSpace holes(discrete, {0.0, 0.5, 0.5});
  const auto res = doubling_constant(holes, r06);
  CHECK(res.infinite);
  CHECK(res.witness_point == 0);

  // uniform 2-D grid, interior centre: (2r+1)^2 / (r+1)^2 lattice points at small radii tends to 4
  models::SampleSpec spec;
  spec.pitch = 0.05;
  const auto grid = models::sample(models::EuclideanBox{2, 2.0}, spec, models::WeightModel::uniform);
  Index centre = 0;
  double best = 1e9;
  for (Index i = 0; i < grid.size(); ++i) {
    const double dx = grid.space.coords()[i][0] - 1.0, dy = grid.space.coords()[i][1] - 1.0;
    if (dx * dx + dy * dy < best) {
      best = dx * dx + dy * dy;
      centre = i;
    }
  }
  double small = 0, big = 0;
  for (Index y = 0; y < grid.size(); ++y) {
    if (grid.space(centre, y) <= 0.3) small += grid.weights[y];
    if (grid.space(centre, y) <= 0.6) big += grid.weights[y];
  }
  CHECK(big / small == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("scalar statistics are permutation invariant") {
  models::SplitMix rng(21);
  for (int rep = 0; rep < 15; ++rep) {
    const auto s = random_space(8, rng);
    std::vector<Index> perm(8);
    std::iota(perm.begin(), perm.end(), Index{0});
    for (std::size_t i = 7; i > 0; --i) std::swap(perm[i], perm[rng.next() % (i + 1)]);
    const auto p = s.permuted(perm);
    CHECK(reversibility(p) == reversibility(s));
    CHECK(diameter(p) == diameter(s));
    const double eps = rng.uniform(0.5, 3.0);
    CHECK(covering_number(p, eps).value() == covering_number(s, eps).value());
    CHECK(capacity(p, eps).value() == capacity(s, eps).value());
  }
}

TEST_CASE("symmetrize is idempotent, fully reversible and close to the input") {
  models::SplitMix rng(22);
  for (int rep = 0; rep < 15; ++rep) {
    const auto s = random_space(7, rng);
    const auto h = symmetrize(s);
    CHECK(symmetrize(h).dist() == h.dist());
    CHECK(reversibility(h) == 1.0);
    const double lambda = reversibility(s);
    for (Index x = 0; x < 7; ++x)
      for (Index y = 0; y < 7; ++y) CHECK(std::abs(h(x, y) - s(x, y)) <= (lambda - 1) / 2 * s(y, x) + 1e-12);
  }
}

TEST_CASE("theta bound step function") {
  const ThetaBound th({{1.0, 2.0}, {2.0, 3.0}});
  CHECK(th(0.5) == 2.0);
  CHECK(th(1.0) == 2.0);
  CHECK(th(1.5) == 3.0);
  CHECK(th(5.0) == 3.0);
  CHECK_THROWS_AS(ThetaBound({{1.0, 0.5}}), DomainError);
  CHECK_THROWS_AS(ThetaBound({{2.0, 2.0}, {1.0, 3.0}}), DomainError);
}
