#pragma once

#include "sabetti/covering.hpp"
#include "sabetti/mayer_vietoris.hpp"

namespace sabetti::test {

// Two closed arcs covering a circle meet in two disjoint arcs.
inline IncidenceData two_arc_circle() {
  IncidenceData inc;
  inc.piece_count = 2;
  inc.components = {{{0}, 1}, {{1}, 1}, {{0, 1}, 2}};
  for (int c = 0; c < 2; ++c) {
    inc.inclusion.push_back({{{0, 1}, c}, 0, {{1}, 0}});
    inc.inclusion.push_back({{{0, 1}, c}, 1, {{0}, 0}});
  }
  return inc;
}

// Three sectors of a disk: every pair and the triple meet in one piece.
inline IncidenceData three_sector_disk() {
  IncidenceData inc;
  inc.piece_count = 3;
  inc.components = {{{0}, 1}, {{1}, 1}, {{2}, 1}, {{0, 1}, 1}, {{0, 2}, 1}, {{1, 2}, 1}, {{0, 1, 2}, 1}};
  const std::vector<std::vector<int>> pairs{{0, 1}, {0, 2}, {1, 2}};
  for (const auto& p : pairs) {
    inc.inclusion.push_back({{p, 0}, 0, {{p[1]}, 0}});
    inc.inclusion.push_back({{p, 0}, 1, {{p[0]}, 0}});
  }
  inc.inclusion.push_back({{{0, 1, 2}, 0}, 0, {{1, 2}, 0}});
  inc.inclusion.push_back({{{0, 1, 2}, 0}, 1, {{0, 2}, 0}});
  inc.inclusion.push_back({{{0, 1, 2}, 0}, 2, {{0, 1}, 0}});
  return inc;
}

inline Formula annulus_2d() {
  return parse_formula("(and (>=0 (+ (^ x1 2) (^ x2 2) -1)) (<=0 (+ (^ x1 2) (^ x2 2) -4)))", 2);
}

// Upper and lower arcs of the annulus, overlapping in |x2| <= 1/4.
inline Cover annulus_arcs(int depth) {
  const Formula a = annulus_2d();
  CoverOptions o;
  o.backend = CoverBackend::USER;
  o.depth = depth;
  o.box = Box(2, Interval(-2, 2));
  o.user_pieces = {Formula::make_and({a, parse_formula("(>=0 (+ x2 1/4))", 2)}),
                   Formula::make_and({a, parse_formula("(<=0 (- x2 1/4))", 2)})};
  return build_cover(a, a.atom_polynomials(), EpsilonSchedule(Rational(1, 2), 4), o);
}

inline Cover disk_sectors(int depth) {
  const Formula disk = parse_formula("(<=0 (+ (^ x1 2) (^ x2 2) -1))", 2);
  const auto f = [](const char* s) { return parse_formula(s, 2); };
  CoverOptions o;
  o.backend = CoverBackend::USER;
  o.depth = depth;
  o.box = Box(2, Interval(-1, 1));
  o.user_pieces = {Formula::make_and({disk, f("(>=0 x2)")}), Formula::make_and({disk, f("(<=0 x2)"), f("(>=0 x1)")}),
                   Formula::make_and({disk, f("(<=0 x2)"), f("(<=0 x1)")})};
  return build_cover(disk, disk.atom_polynomials(), EpsilonSchedule(Rational(1, 2), 2), o);
}

// Union of three disks with random centers and radii.
template <class Rng>
Formula random_disk_union(Rng& rng) {
  std::vector<Formula> disks;
  for (int i = 0; i < 3; ++i) {
    const Rational cx(static_cast<long>(rng() % 9) - 4, 4), cy(static_cast<long>(rng() % 9) - 4, 4);
    const Rational r2(1 + static_cast<long>(rng() % 4), 4);
    const MultiPoly x = MultiPoly::variable(2, 0) - MultiPoly::constant(2, cx);
    const MultiPoly y = MultiPoly::variable(2, 1) - MultiPoly::constant(2, cy);
    disks.push_back(Formula::atom(x * x + y * y - MultiPoly::constant(2, r2), Relation::LE));
  }
  return Formula::make_or(disks);
}

inline Cover grid_cover(const Formula& s, int depth) {
  CoverOptions o;
  o.depth = depth;
  o.box = Box(2, Interval(-2, 2));
  return build_cover(s, s.atom_polynomials(), EpsilonSchedule(Rational(1, 2), 6), o);
}

}  // namespace sabetti::test
