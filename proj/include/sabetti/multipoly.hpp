#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include "sabetti/interval.hpp"
#include "sabetti/rational.hpp"
#include "sabetti/unipoly.hpp"

namespace sabetti {

using Exponents = std::vector<int>;

struct Term {
  Exponents exps;
  Rational coef;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse polynomial in a fixed number of variables over Q. Terms are kept
/// sorted by lexicographic exponent order with no zero coefficients; the
/// last term is the lex-leading one.
class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(int variable_count) : k_(variable_count) {}
  MultiPoly(int variable_count, std::vector<Term> terms);

  static MultiPoly constant(int variable_count, const Rational& c);
  /// The variable x_{index+1} (0-based index).
  static MultiPoly variable(int variable_count, int index);
  static MultiPoly monomial(int variable_count, const Rational& c, Exponents exps);

  int variable_count() const { return k_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (0 if absent).
  Rational constant_term() const;
  int degree() const;
  int degree_in(int var) const;
  const Term& leading_term() const { return terms_.back(); }

  Rational operator()(const std::vector<Rational>& point) const;

  MultiPoly derivative(int var) const;
  /// Replaces x_var by a value; the variable stays in the ring with degree 0.
  MultiPoly substitute(int var, const Rational& value) const;
  /// p(x + shift) for a shift vector.
  MultiPoly translate(const std::vector<Rational>& shift) const;
  /// Coefficients of p viewed as a polynomial in x_var, lowest degree first.
  std::vector<MultiPoly> coefficients_in(int var) const;
  /// Requires every variable other than var to be absent.
  UniPoly to_unipoly(int var) const;
  /// Embeds a univariate polynomial as a polynomial in x_var.
  static MultiPoly from_unipoly(int variable_count, int var, const UniPoly& p);

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator-(const MultiPoly& a);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const Rational& s, const MultiPoly& a);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.k_ == b.k_ && a.terms_ == b.terms_;
  }
  friend bool operator<(const MultiPoly& a, const MultiPoly& b);

  /// Human-readable infix form, used in diagnostics only.
  std::string str() const;
  friend std::ostream& operator<<(std::ostream& os, const MultiPoly& p) { return os << p.str(); }

 private:
  void normalize();
  int k_ = 0;
  std::vector<Term> terms_;
};

MultiPoly pow(const MultiPoly& p, unsigned n);
std::size_t hash_value(const MultiPoly& p);

/// Exact quotient a / b; throws InvalidArgument when b does not divide a.
MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b);

/// Natural interval extension, evaluated term by term in the monomial basis.
/// Inclusion isotone.
Interval eval_interval(const MultiPoly& p, const Box& box);

/// Term-by-term evaluation of the Taylor expansion about the box midpoint,
/// intersected with the natural extension. Sound and much tighter on small
/// boxes far from the origin, but not inclusion isotone.
Interval eval_interval_centered(const MultiPoly& p, const Box& box);

/// Resultant with respect to x_var by the subresultant pseudo-remainder sequence.
MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, int var);

/// Resultant as the determinant of the Sylvester matrix (fraction-free
/// elimination over the coefficient ring). Intended for small degrees.
MultiPoly sylvester_resultant(const MultiPoly& p, const MultiPoly& q, int var);

}  // namespace sabetti

template <>
struct std::hash<sabetti::MultiPoly> {
  std::size_t operator()(const sabetti::MultiPoly& p) const { return sabetti::hash_value(p); }
};
