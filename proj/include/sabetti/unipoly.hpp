#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sabetti/interval.hpp"
#include "sabetti/rational.hpp"

namespace sabetti {

/// Dense univariate polynomial over Q, coefficients lowest degree first.
/// The zero polynomial has no coefficients; otherwise the leading one is nonzero.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coefficients);
  static UniPoly constant(const Rational& c);
  /// The monomial c * x^n.
  static UniPoly monomial(const Rational& c, unsigned n);
  /// Product of (x - r) over the given roots.
  static UniPoly from_roots(const std::vector<Rational>& roots);

  const std::vector<Rational>& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// Degree; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Rational& leading() const { return c_.back(); }
  Rational coefficient(unsigned i) const { return i < c_.size() ? c_[i] : Rational(0); }

  Rational operator()(const Rational& x) const;
  Interval operator()(const Interval& x) const;
  int sign_at(const Rational& x) const { return (*this)(x).sign(); }

  UniPoly derivative() const;
  UniPoly monic() const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator-(const UniPoly& a);
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(const Rational& s, const UniPoly& a);
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.c_ == b.c_; }

  std::string str(const std::string& var = "x") const;
  friend std::ostream& operator<<(std::ostream& os, const UniPoly& p) { return os << p.str(); }

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Euclidean division a = q*b + r with deg r < deg b.
std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);
UniPoly gcd(UniPoly a, UniPoly b);
/// p / gcd(p, p'), made monic.
UniPoly squarefree_part(const UniPoly& p);

/// Canonical Sturm sequence p0 = p, p1 = p', p_{i+1} = -rem(p_{i-1}, p_i).
class SturmSequence {
 public:
  explicit SturmSequence(const UniPoly& p);
  /// Number of sign variations at x (zeros skipped).
  int variations(const Rational& x) const;
  /// Distinct real roots in the half-open interval (a, b].
  int count(const Rational& a, const Rational& b) const;
  const UniPoly& base() const { return seq_.front(); }

 private:
  std::vector<UniPoly> seq_;
};

/// Upper bound on the absolute value of every real root (Cauchy bound).
Rational root_bound(const UniPoly& p);

/// Pairwise-disjoint closed intervals, each containing exactly one distinct
/// real root of p inside `range`, in increasing order. Exact rational roots
/// found during bisection are returned as point intervals.
std::vector<Interval> sturm_isolate(const UniPoly& p, const Interval& range);

/// Shrinks an isolating interval of the squarefree part of p to width <= width.
Interval refine_root(const UniPoly& p, const Interval& iso, const Rational& width);

/// Number of distinct real roots of p in the closed interval.
int count_roots(const UniPoly& p, const Interval& range);

}  // namespace sabetti
