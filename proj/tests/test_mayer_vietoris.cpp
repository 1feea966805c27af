#include <doctest.h>

#include <random>

#include "sabetti/covering.hpp"
#include "sabetti/mayer_vietoris.hpp"
#include "mv_cases.hpp"

using namespace sabetti;

using test::three_sector_disk;
using test::two_arc_circle;

namespace {
Formula f2(const char* s) { return parse_formula(s, 2); }
}  // namespace

TEST_CASE("two-arc circle: ranks (1, 0) and b1 = 1") {
  const MvBetti b = betti_from_cover(two_arc_circle());
  CHECK(b.rank_d1 == 1);
  CHECK(b.rank_d2 == 0);
  CHECK(b.b0 == 1);
  CHECK(b.b1 == 1);
  CHECK(rat_rank(delta1(two_arc_circle())) == 1);
}

TEST_CASE("three-sector disk: rank d2 = 1 and b1 = 0") {
  const IncidenceData inc = three_sector_disk();
  const MvBetti b = betti_from_cover(inc);
  CHECK(b.rank_d1 == 2);
  CHECK(b.rank_d2 == 1);
  CHECK(b.b0 == 1);
  CHECK(b.b1 == 0);
  const RatMatrix d1 = delta1(inc), d2 = delta2(inc);
  CHECK(d1.rows() == 3);
  CHECK(d2.rows() == 1);
  CHECK(d2(0, 0) == Rational(1));
  CHECK(d2(0, 1) == Rational(-1));
  CHECK(d2(0, 2) == Rational(1));
  const RatMatrix p = d2 * d1;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) CHECK(p(i, j) == Rational(0));
}

TEST_CASE("missing inclusion is reported") {
  IncidenceData inc = two_arc_circle();
  inc.inclusion.pop_back();
  CHECK_THROWS_AS(betti_from_cover(inc), Error);
}

TEST_CASE("two arcs of an annulus as a user cover") {
  const Cover cover = test::annulus_arcs(7);
  const IncidenceData inc = build_incidence(cover, 7);
  CHECK(inc.components.at({0, 1}) == 2);
  const MvBetti b = betti_from_cover(inc, cover);
  CHECK(b.rank_d1 == 1);
  CHECK(b.rank_d2 == 0);
  CHECK(b.b1 == 1);
  REQUIRE_FALSE(b.warnings.empty());
  CHECK(b.warnings.front().rfind("UncertifiedCover", 0) == 0);
}

TEST_CASE("three sectors of a disk as a user cover") {
  const Cover cover = test::disk_sectors(6);
  const MvBetti b = betti_from_cover(build_incidence(cover, 6), cover);
  CHECK(b.triples == 1);
  CHECK(b.rank_d2 == 1);
  CHECK(b.b0 == 1);
  CHECK(b.b1 == 0);
}

TEST_CASE("grid-cell covers satisfy d2 d1 = 0 and match the raster") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const Formula s = test::random_disk_union(rng);
    const Cover cover = test::grid_cover(s, 6);
    const IncidenceData inc = build_incidence(cover, 6);
    CHECK(complex_property_holds(delta_matrices(inc)));
    const MvBetti b = betti_from_cover(inc, cover);
    const CubicalHomology h = adaptive_homology(s, cover.box, 6, RasterMode::OUTER);
    CHECK(b.b0 == h.betti.b0);
    CHECK(b.b1 == h.betti.b1);
  }
}

TEST_CASE("grid components of two disks") {
  const Formula s = f2("(or (<=0 (+ (^ (+ x1 2) 2) (^ x2 2) -1)) (<=0 (+ (^ (- x1 2) 2) (^ x2 2) -1)))");
  const GridComponents g = grid_components(s, Box(2, Interval(-4, 4)), 6);
  REQUIRE(g.components.size() == 2);
  for (const auto& c : g.components) {
    REQUIRE(c.witness);
    CHECK(s.holds_at(*c.witness));
  }
}
