#include <doctest.h>

#include "sabetti/formula.hpp"
#include "sabetti/roadmap.hpp"

using namespace sabetti;

namespace {
MultiPoly p2(const char* s) { return parse_poly(s, 2); }
}  // namespace

TEST_CASE("circle: one component, two critical values") {
  const MultiPoly q = p2("(+ (^ x1 2) (^ x2 2) -1)");
  const RoadmapGraph g = build_roadmap(q);
  CHECK(g.component_count() == 1);
  int pseudo = 0;
  for (const auto& v : g.values)
    if (v.kind == ValueKind::PSEUDO_CRITICAL) ++pseudo;
  CHECK(pseudo == 2);
  CHECK(rm2_sampled(g, 50, 7));
}

TEST_CASE("two disjoint circles and a lemniscate-free quartic") {
  CHECK(curve_components(p2("(* (+ (^ x1 2) (^ x2 2) -1) (+ (^ (- x1 4) 2) (^ x2 2) -1))")) == 2);
  CHECK(curve_components(p2("(+ (^ (+ (^ x1 2) -4) 2) (* 4 (^ x2 2)) -4)")) == 2);
  CHECK(curve_components(p2("(+ (* 1/4 (^ x1 2)) (^ x2 2) -1)")) == 1);
}

TEST_CASE("critical values of the ellipse are exact") {
  const MultiPoly q = p2("(+ (* 1/4 (^ x1 2)) (^ x2 2) -1)");
  const auto vals = pseudo_critical_x(q, true, Rational(1, 4));
  REQUIRE(vals.size() == 2);
  CHECK(vals[0].isolating.lo() <= Rational(-2));
  CHECK(vals[0].isolating.hi() >= Rational(-2));
  CHECK(vals[1].isolating.lo() <= Rational(2));
  CHECK(vals[1].isolating.hi() >= Rational(2));
}

TEST_CASE("path from a rational point stays on the curve") {
  const MultiPoly q = p2("(+ (^ x1 2) (^ x2 2) -1)");
  const Point start{Rational(3, 5), Rational(4, 5)};
  const RoadmapGraph g = build_roadmap(q, {start});
  const RoadmapPath path = connect_point(g, start);
  REQUIRE(path.start >= 0);
  REQUIRE_FALSE(path.edges.empty());
  CHECK(path.nodes.size() == path.edges.size() + 1);
  const RoadmapNode& end = g.nodes[static_cast<std::size_t>(path.nodes.back())];
  CHECK(g.values[static_cast<std::size_t>(end.value)].kind == ValueKind::PSEUDO_CRITICAL);
  const Rational tol(1, 1 << 20);
  for (const PathSample& s : sample_path(g, path, 4, tol)) CHECK(s.residual <= tol);
}

TEST_CASE("point off the curve is rejected") {
  CHECK_THROWS_AS(connect_point(p2("(+ (^ x1 2) (^ x2 2) -1)"), Point{Rational(1), Rational(1)}), Error);
}

TEST_CASE("deformation at zeta = 1 is the G polynomial") {
  const MultiPoly q = p2("(+ (^ x1 2) (^ x2 2) -1)");
  const MultiPoly g = deform(q, Rational(1), Rational(1, 2), 4);
  CHECK(g == p2("(+ (* 1/16 (^ x1 4)) (* 1/16 (^ x2 4)) (* 1/16 (^ x2 2)) -3)"));
}
