#include <doctest.h>

#include <random>

#include "sabetti/linalg.hpp"
#include "sabetti/multipoly.hpp"
#include "sabetti/unipoly.hpp"
#include "support.hpp"

using namespace sabetti;

TEST_CASE("rational arithmetic stays in lowest terms") {
  const Rational a(6, -4);
  CHECK(a.str() == "-3/2");
  CHECK((a + Rational(3, 2)).is_zero());
  CHECK(Rational::parse("-10/4") == a + Rational(-1));
  CHECK(Rational::parse("−1/2") == Rational(-1, 2));
  CHECK(pow(Rational(2, 3), 3) == Rational(8, 27));
  CHECK(dyadic(3, 4) == Rational(3, 16));
}

TEST_CASE("polynomial division and gcd") {
  const UniPoly p = UniPoly::from_roots({1, 2, 2, Rational(-1, 3)});
  const UniPoly q = UniPoly::from_roots({2, 5});
  const auto [quot, rem] = divmod(p, q);
  CHECK(quot * q + rem == p);
  CHECK(rem.degree() < q.degree());
  CHECK(gcd(p, q) == UniPoly::from_roots({2}));
  CHECK(squarefree_part(p) == UniPoly::from_roots({1, 2, Rational(-1, 3)}));
}

TEST_CASE("Sturm counts distinct roots of products of linear factors") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rational> roots;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) roots.emplace_back(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 4));
    // A repeated factor keeps the count of distinct roots unchanged.
    roots.push_back(roots.front());
    const UniPoly p = UniPoly::from_roots(roots);
    const Interval range(-8, 8);
    CHECK(count_roots(p, range) == test::distinct_in(roots, range));
    const auto iso = sturm_isolate(p, range);
    CHECK(static_cast<int>(iso.size()) == test::distinct_in(roots, range));
  }
}

TEST_CASE("sturm_isolate keeps a root on a bisection point in one interval") {
  // Roots at 0 and +-1: the first bisection of [-2, 2] lands on a root.
  const UniPoly p = UniPoly::from_roots({-1, 0, 1});
  const auto iso = sturm_isolate(p, Interval(-2, 2));
  REQUIRE(iso.size() == 3);
  for (std::size_t i = 0; i + 1 < iso.size(); ++i) CHECK(iso[i].hi() < iso[i + 1].lo());
  CHECK(iso[1].lo() == Rational(0));
  CHECK(iso[1].hi() == Rational(0));
}

TEST_CASE("resultant vanishes exactly on a common factor") {
  std::mt19937_64 rng(11);
  const auto random_linear = [&] {
    return MultiPoly::variable(1, 0) - MultiPoly::constant(1, Rational(static_cast<long>(rng() % 21) - 10, 1 + static_cast<long>(rng() % 3)));
  };
  for (int trial = 0; trial < 50; ++trial) {
    const MultiPoly c = random_linear();
    const MultiPoly a = random_linear() * random_linear();
    const MultiPoly b = random_linear();
    CHECK(resultant(a * c, b * c, 0).is_zero());
    const UniPoly ua = a.to_unipoly(0), ub = b.to_unipoly(0);
    const bool coprime = gcd(ua, ub).degree() == 0;
    CHECK(resultant(a, b, 0).is_zero() == !coprime);
    CHECK(resultant(a, b, 0) == sylvester_resultant(a, b, 0));
  }
}

TEST_CASE("bivariate resultant eliminates a variable") {
  // Circle and line y = x meet where 2x^2 = 1.
  const MultiPoly x = MultiPoly::variable(2, 0), y = MultiPoly::variable(2, 1);
  const MultiPoly circle = x * x + y * y - MultiPoly::constant(2, 1);
  const MultiPoly line = y - x;
  const MultiPoly r = resultant(circle, line, 1);
  CHECK(r.degree_in(1) == 0);
  CHECK(r.substitute(0, Rational(0)).constant_term() != Rational(0));
  const UniPoly u = r.to_unipoly(0);
  CHECK(count_roots(u, Interval(-2, 2)) == 2);
}

TEST_CASE("rat_rank agrees with naive elimination") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 7), cols = 1 + static_cast<int>(rng() % 7);
    RatMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = rng() % 3 == 0 ? Rational(0) : Rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 3));
    }
    // Low-rank rows from combinations of earlier ones.
    if (rows > 2 && trial % 2 == 0) m.row(rows - 1) = m.row(0) * Rational(2) - m.row(1);
    CHECK(rat_rank(m) == test::naive_rank(m));
  }
}

TEST_CASE("sparse column reduction matches the dense rank") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = 2 + static_cast<int>(rng() % 10), cols = 2 + static_cast<int>(rng() % 10);
    std::vector<Eigen::Triplet<std::int64_t>> t;
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        if (rng() % 3 == 0) t.emplace_back(i, j, static_cast<std::int64_t>(rng() % 5) - 2);
      }
    }
    IntSparse m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    CHECK(sparse_rank(m) == test::naive_rank(to_rat(m)));
  }
}
