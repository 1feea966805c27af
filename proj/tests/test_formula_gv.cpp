#include <doctest.h>

#include "sabetti/covering.hpp"
#include "sabetti/cubical.hpp"
#include "sabetti/gv_closure.hpp"

using namespace sabetti;

namespace {
Formula f2(const char* s) { return parse_formula(s, 2); }
Point pt(Rational x, Rational y) { return {x, y}; }
}  // namespace

TEST_CASE("formula round trip through text and json") {
  const char* texts[] = {
      "(<=0 (+ (^ x1 2) (^ x2 2) -1))",
      "(and (>=0 (+ (^ x1 2) (^ x2 2) -1)) (not (>0 (- x1 x2))))",
      "(or (=0 (* x1 x2)) (<0 (+ x1 1/3)))",
  };
  for (const char* t : texts) {
    const Formula f = f2(t);
    CHECK(parse_formula(f.str(), 2) == f);
    CHECK(formula_from_json(to_json(f), 2) == f);
  }
  CHECK_THROWS_AS(f2("(<=0 (+ x3 1))"), Error);
  CHECK_THROWS_AS(f2("(and (<=0 x1)"), Error);
}

TEST_CASE("pointwise evaluation and closedness") {
  const Formula annulus = f2("(and (>=0 (+ (^ x1 2) (^ x2 2) -1)) (<=0 (+ (^ x1 2) (^ x2 2) -4)))");
  CHECK(annulus.holds_at(pt(1, 0)));
  CHECK(annulus.holds_at(pt(Rational(3, 2), 0)));
  CHECK_FALSE(annulus.holds_at(pt(0, 0)));
  CHECK_FALSE(annulus.holds_at(pt(3, 0)));
  CHECK(is_p_closed(annulus));
  CHECK_FALSE(is_p_closed(f2("(<0 x1)")));
  CHECK_FALSE(is_p_closed(f2("(not (<=0 x1))")));
  CHECK(annulus.atom_polynomials().size() == 2);
}

TEST_CASE("box classification is sound") {
  const Formula disk = f2("(<=0 (+ (^ x1 2) (^ x2 2) -1))");
  CHECK(classify_box(disk, Box{Interval(Rational(-1, 4), Rational(1, 4)), Interval(Rational(-1, 4), Rational(1, 4))}) ==
        BoxLabel::INSIDE);
  CHECK(classify_box(disk, Box{Interval(2, 3), Interval(2, 3)}) == BoxLabel::OUTSIDE);
  CHECK(classify_box(disk, Box{Interval(0, 2), Interval(0, 2)}) == BoxLabel::UNKNOWN);
}

TEST_CASE("sign conditions and their realizations") {
  const std::vector<MultiPoly> fam{parse_poly("x1", 2), parse_poly("(- x2 1)", 2)};
  const SignCondition s = sign_condition_at(fam, pt(0, 2));
  CHECK(s.signs == std::vector<int>{0, 1});
  CHECK(level(s) == 1);
  CHECK(realize(s).holds_at(pt(0, 3)));
  CHECK_FALSE(realize(s).holds_at(pt(0, 1)));
  CHECK(weak_relaxation(s).holds_at(pt(0, 1)));
}

TEST_CASE("epsilon schedule is increasing and serializes") {
  const EpsilonSchedule e(Rational(1, 2), 4, Rational(1, 2));
  CHECK(e.value(1) == Rational(1, 32));
  CHECK(e.value(4) == Rational(1, 4));
  for (int i = 1; i < 4; ++i) CHECK(e.value(i) < e.value(i + 1));
  const EpsilonSchedule r = EpsilonSchedule::from_json(e.to_json());
  CHECK(r.value(2) == e.value(2));
  CHECK_THROWS_AS(EpsilonSchedule(Rational(2), 3), Error);
}

TEST_CASE("closed replacement of an open disk is closed with the same homology") {
  const Formula s = f2("(<=0 (+ (^ x1 2) (^ x2 2) -4))");
  const std::vector<MultiPoly> fam{parse_poly("(+ (^ x1 2) (^ x2 2) -1)", 2)};
  const SignCondition inside{fam, {-1}};
  const EpsilonSchedule eps(Rational(1, 4), 2);
  const Formula x = gv_replace(fam, {inside}, s, eps);
  CHECK(is_p_closed(x));
  const Box box(2, Interval(-2, 2));
  const StableBetti b = stable_betti(x, box, 256);
  CHECK(b.converged);
  CHECK(b.b0 == 1);
  CHECK(b.b1 == 0);
  CHECK_FALSE(x.holds_at(pt(1, 0)));
  CHECK(x.holds_at(pt(0, 0)));
}

TEST_CASE("schedule too short for the realized levels is rejected") {
  const Formula s = f2("(<=0 (+ (^ x1 2) (^ x2 2) -4))");
  const std::vector<MultiPoly> fam{parse_poly("x1", 2), parse_poly("x2", 2)};
  const SignCondition origin{fam, {0, 0}};
  CHECK_THROWS_AS(gv_replace(fam, {origin}, s, EpsilonSchedule(Rational(1, 2), 3)), Error);
  CHECK_NOTHROW(gv_replace(fam, {origin}, s, EpsilonSchedule(Rational(1, 2), 4)));
}

TEST_CASE("star perturbation thickens equations") {
  const Formula circle = f2("(=0 (+ (^ x1 2) (^ x2 2) -1))");
  const Formula p = star_perturbation(circle, Rational(1, 8));
  CHECK(is_p_closed(p));
  CHECK(p.holds_at(pt(1, 0)));
  const StableBetti b = stable_betti(p, Box(2, Interval(-2, 2)), 1024);
  CHECK(b.converged);
  CHECK(b.b0 == 1);
  CHECK(b.b1 == 1);
  CHECK(perturbation_degree(circle) == 4);
  CHECK(perturbation_degree(f2("(<=0 (+ (^ x1 3) x2))")) == 4);
  CHECK(perturbation_degree(f2("(>=0 x1)")) == 2);
  const MultiPoly h = perturbation_polynomial(2, 2, 4);
  CHECK(h == parse_poly("(+ 1 (* 2 (^ x1 4)) (* 4 (^ x2 4)))", 2));
}

TEST_CASE("bounding box inference") {
  const auto b = infer_bounding_box(f2("(<=0 (+ (* 4 (^ x1 2)) (^ x2 2) -4))"));
  REQUIRE(b);
  CHECK((*b)[0].lo() <= Rational(-1));
  CHECK((*b)[0].hi() >= Rational(1));
  CHECK((*b)[1].hi() >= Rational(2));
  CHECK_FALSE(infer_bounding_box(f2("(<=0 x1)")));
}

TEST_CASE("cubical homology of hand-made complexes") {
  // Ring of eight squares around a hole.
  Grid g(Box(2, Interval(0, 3)), 3);
  CubicalComplex ring{g, {}};
  for (std::int64_t c = 0; c < 9; ++c)
    if (c != 4) ring.cubes.push_back(c);
  CHECK(cubical_betti(ring) == BettiNumbers{1, 1, 0});

  // Hollow 3x3x3 block.
  Grid g3(Box(3, Interval(0, 3)), 3);
  CubicalComplex shell{g3, {}};
  for (std::int64_t c = 0; c < 27; ++c)
    if (c != 13) shell.cubes.push_back(c);
  CHECK(cubical_betti(shell) == BettiNumbers{1, 0, 1});

  // Two squares touching at a corner form one component.
  Grid g2(Box(2, Interval(0, 2)), 2);
  CubicalComplex diag{g2, {0, 3}};
  CHECK(cubical_betti(diag) == BettiNumbers{1, 0, 0});
}

TEST_CASE("rasters of the annulus") {
  const Formula annulus = f2("(and (>=0 (+ (^ x1 2) (^ x2 2) -1)) (<=0 (+ (^ x1 2) (^ x2 2) -4)))");
  const Box box(2, Interval(-2, 2));
  const CubicalComplex inner = rasterize(annulus, box, 64, RasterMode::INNER);
  const CubicalComplex outer = rasterize(annulus, box, 64, RasterMode::OUTER);
  CHECK(inner.cubes.size() < outer.cubes.size());
  CHECK(std::includes(outer.cubes.begin(), outer.cubes.end(), inner.cubes.begin(), inner.cubes.end()));
  CHECK(cubical_betti(inner) == BettiNumbers{1, 1, 0});
  const StableBetti s = stable_betti(annulus, box, 512);
  CHECK(s.converged);
  CHECK(s.b1 == 1);
  CHECK(adaptive_homology(annulus, box, 7, RasterMode::OUTER).betti == BettiNumbers{1, 1, 0});
}
