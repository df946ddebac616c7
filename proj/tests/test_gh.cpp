#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qms/error.hpp"
#include "qms/gh.hpp"
#include "qms/models.hpp"

using namespace qms;
using namespace qms::gh;
using testing_support::dirac;
using testing_support::from_rows;
using testing_support::random_measure;
using testing_support::random_space;
using testing_support::rows_of;

TEST_CASE("distortion and defects") {
  const auto s = from_rows({{0, 2}, {2, 0}});
  const auto pt = from_rows({{0}});
  CHECK(distortion(s, s, PointMap{{0, 1}}) == 0.0);
  CHECK(distortion(s, pt, PointMap{{0, 0}}) == 2.0);
  CHECK(isometry_defect(s, s, PointMap{{0, 1}}) == 0.0);
  CHECK(covering_defect(s, PointMap{{0, 0}}) == 2.0);
  CHECK_THROWS_AS(distortion(s, s, PointMap{{0}}), StructureError);
  CHECK_THROWS_AS(distortion(s, s, PointMap{{0, 5}}), StructureError);
}

TEST_CASE("forward Hausdorff distance") {
  const auto s = from_rows({{0, 1, 4}, {3, 0, 2}, {5, 1, 0}});
  const IndexSet a{0}, b{1}, ab{0, 1}, abc{0, 1, 2};
  CHECK(hausdorff(s, ab, ab).value == 0.0);
  const auto h = hausdorff(s, a, b);
  CHECK(h.value == std::max(s(0, 1), s(1, 0)));
  CHECK(h.b_into_a == s(0, 1));
  CHECK(h.a_into_b == s(1, 0));
  // nested: only the larger set needs fattening of the smaller
  const auto nested = hausdorff(s, ab, abc);
  CHECK(nested.a_into_b == 0.0);
  CHECK(nested.value == std::min(s(0, 2), s(1, 2)));
}

TEST_CASE("iso defect small cases") {
  const auto s = from_rows({{0, 1, 2}, {2, 0, 1}, {1, 2, 0}});
  CHECK(iso_defect(s, s).value == 0.0);

  const auto pt = from_rows({{0}});
  const auto two = from_rows({{0, 3}, {1.5, 0}});
  const auto d = iso_defect(pt, two);
  CHECK(d.value == 1.5);  // map to point 1, which reaches 0 at forward distance 1.5
  CHECK(d.map(0) == 1);
  CHECK_FALSE(d.heuristic);

  const double delta = 0.3;
  auto bumped = rows_of(s);
  bumped[0][2] += delta;
  CHECK(iso_defect(s, from_rows(bumped)).value <= delta + 1e-12);
}

TEST_CASE("iso defect: exact search equals the brute-force oracle; local search never beats it") {
  models::SplitMix rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rng.next() % 4, m = 2 + rng.next() % 4;
    const auto x = random_space(n, rng), y = random_space(m, rng);
    const double want = oracle::iso_defect_bruteforce(rows_of(x), rows_of(y));
    const auto exact = iso_defect(x, y);
    CHECK_FALSE(exact.heuristic);
    CHECK(exact.value == doctest::Approx(want).epsilon(1e-12));
    CHECK(isometry_defect(x, y, exact.map) == doctest::Approx(exact.value).epsilon(1e-12));
    IsoDefectOptions local;
    local.force_local_search = true;
    local.seed = static_cast<std::uint64_t>(rep);
    const auto heur = iso_defect(x, y, local);
    CHECK(heur.heuristic);
    CHECK(heur.value >= want - 1e-12);
    CHECK(heur.value == doctest::Approx(want).epsilon(1e-12));  // tiny spaces: restarts find the optimum
  }
}

TEST_CASE("gh bracket") {
  models::SplitMix rng(32);
  const auto x = random_space(5, rng);
  const double th = reversibility(x);
  const auto self = gh_bracket(x, x, th);
  CHECK(self.lower == 0.0);
  CHECK(self.upper == 0.0);
  CHECK_THROWS_AS(gh_bracket(x, x, 0.5 * th), DomainError);

  // (1 + delta) X: the identity has distortion delta diam X
  const double delta = 0.05;
  auto big = rows_of(x);
  for (auto& row : big)
    for (double& v : row) v *= 1 + delta;
  const auto br = gh_bracket(x, from_rows(big), th);
  CHECK(br.upper <= 2 * delta * diameter(x) + 1e-12);
  CHECK(br.lower <= br.upper);

  for (int rep = 0; rep < 30; ++rep) {
    const auto a = random_space(2 + rng.next() % 4, rng), b = random_space(2 + rng.next() % 4, rng);
    const double t = std::max(reversibility(a), reversibility(b));
    const auto ab = gh_bracket(a, b, t), ba = gh_bracket(b, a, t);
    CHECK(ab.lower <= ab.upper);
    CHECK(ab.lower == ba.lower);
    CHECK(ab.upper == ba.upper);
  }
}

TEST_CASE("composed witness maps stay within the summed defects") {
  models::SplitMix rng(33);
  for (int rep = 0; rep < 30; ++rep) {
    const auto x = random_space(4, rng), y = random_space(4, rng), z = random_space(4, rng);
    const auto f = iso_defect(x, y), g = iso_defect(y, z);
    PointMap gf;
    for (Index i = 0; i < 4; ++i) gf.assignment.push_back(g.map(f.map(i)));
    const double composed = isometry_defect(x, z, gf);
    CHECK(composed <= f.value + 2 * g.value + 1e-12);
    CHECK(iso_defect(x, z).value <= composed + 1e-12);
  }
}

TEST_CASE("Prokhorov distance against subset enumeration") {
  const auto s = from_rows({{0, 2}, {1, 0}});
  CHECK(prokhorov(s, dirac(2, 0), dirac(2, 1)) == 1.0);
  const auto near = from_rows({{0, 0.3}, {0.2, 0}});
  CHECK(prokhorov(near, dirac(2, 0), dirac(2, 1)) == doctest::Approx(0.3));

  models::SplitMix rng(34);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 3 + rng.next() % 5;
    const auto sp = random_space(n, rng, 0.05, 1.2);
    const auto mu = random_measure(n, rng, 0.3), nu = random_measure(n, rng, 0.3);
    CHECK(prokhorov(sp, mu, nu) == doctest::Approx(oracle::prokhorov_bruteforce(rows_of(sp), mu, nu)).epsilon(1e-12));
    CHECK(prokhorov(sp, mu, mu) == 0.0);
    CHECK(prokhorov(sp, mu, nu) == doctest::Approx(prokhorov(sp, nu, mu)).epsilon(1e-12));
    const auto rho = random_measure(n, rng);
    CHECK(prokhorov(sp, mu, rho) <= prokhorov(sp, mu, nu) + prokhorov(sp, nu, rho) + 1e-12);
    // mixing in eps of a Dirac moves the measure by at most eps
    const double eps = 0.1;
    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = (1 - eps) * nu[i] + (i == 0 ? eps : 0.0);
    CHECK(prokhorov(sp, mix, nu) <= eps + 1e-12);
  }
}

TEST_CASE("glue is an admissible quasi-metric extending both sides") {
  models::SplitMix rng(35);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_space(4, rng), y = random_space(3, rng);
    const auto iso = iso_defect(x, y);
    const auto g = glue(x, y, iso.map, iso.value);
    CHECK(validate(g, 1e-12).valid);
    for (Index a = 0; a < 4; ++a)
      for (Index b = 0; b < 4; ++b) CHECK(g(a, b) == x(a, b));
    for (Index a = 0; a < 3; ++a)
      for (Index b = 0; b < 3; ++b) CHECK(g(4 + a, 4 + b) == y(a, b));
  }
}

TEST_CASE("ghp upper bound") {
  models::SplitMix rng(36);
  const auto s = random_space(5, rng);
  const auto mu = random_measure(5, rng), nu = random_measure(5, rng);
  const double th = reversibility(s);
  const MeasuredSpace a(s, mu), b(s, nu);
  CHECK(ghp_upper(a, a, th).upper == 0.0);
  const auto same_space = ghp_upper(a, b, th);
  CHECK(same_space.map_defect == 0.0);
  CHECK(same_space.upper <= prokhorov(s, mu, nu) + 1e-12);
}

TEST_CASE("consecutive Berwald tori with drift exp(-1/i) are eps_i close") {
  models::SampleSpec spec;
  spec.pitch = M_PI;  // 2 x 2 torus grid
  for (int i = 1; i <= 5; ++i) {
    const models::RandersTorus ti{2, std::exp(-1.0 / i)}, tj{2, std::exp(-1.0 / (i + 1))};
    const auto a = models::sample(ti, spec, models::WeightModel::uniform);
    const auto b = models::sample(tj, spec, models::WeightModel::uniform);
    const double eps = 2 * M_PI * (std::exp(-1.0 / (i + 1)) - std::exp(-1.0 / i));
    const double th = std::max(reversibility(a.space), reversibility(b.space));
    const auto r = ghp_upper(a, b, th);
    CHECK(r.map_defect <= eps + 1e-12);
    CHECK(r.hausdorff <= eps + 1e-12);
    CHECK(r.upper <= 2 * eps + 1e-12);
  }
}
