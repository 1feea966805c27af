#include "sabetti/unipoly.hpp"

#include <algorithm>
#include <sstream>

#include "sabetti/error.hpp"

namespace sabetti {

UniPoly::UniPoly(std::vector<Rational> coefficients) : c_(std::move(coefficients)) { trim(); }

UniPoly UniPoly::constant(const Rational& c) { return UniPoly({c}); }

UniPoly UniPoly::monomial(const Rational& c, unsigned n) {
  std::vector<Rational> v(n + 1);
  v[n] = c;
  return UniPoly(std::move(v));
}

UniPoly UniPoly::from_roots(const std::vector<Rational>& roots) {
  UniPoly p = constant(1);
  for (const auto& r : roots) p = p * UniPoly({-r, Rational(1)});
  return p;
}

void UniPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational UniPoly::operator()(const Rational& x) const {
  Rational acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    acc *= x;
    acc += *it;
  }
  return acc;
}

Interval UniPoly::operator()(const Interval& x) const {
  Interval acc(Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i) acc += c_[i] * pow(x, static_cast<unsigned>(i));
  return acc;
}

UniPoly UniPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Rational(static_cast<long>(i));
  return UniPoly(std::move(d));
}

UniPoly UniPoly::monic() const {
  if (is_zero()) return *this;
  const Rational inv = Rational(1) / leading();
  return inv * *this;
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

UniPoly operator-(const UniPoly& a) {
  std::vector<Rational> v;
  v.reserve(a.c_.size());
  for (const auto& c : a.c_) v.push_back(-c);
  return UniPoly(std::move(v));
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> v(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  }
  return UniPoly(std::move(v));
}

UniPoly operator*(const Rational& s, const UniPoly& a) {
  if (s.is_zero()) return {};
  std::vector<Rational> v;
  v.reserve(a.c_.size());
  for (const auto& c : a.c_) v.push_back(s * c);
  return UniPoly(std::move(v));
}

std::string UniPoly::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const Rational& c = c_[static_cast<std::size_t>(i)];
    if (c.is_zero()) continue;
    if (!first) os << (c.sign() < 0 ? " - " : " + ");
    else if (c.sign() < 0) os << "-";
    first = false;
    const Rational a = c.abs();
    if (i == 0 || a != Rational(1)) os << a;
    if (i > 0) os << (a != Rational(1) ? "*" : "") << var << (i > 1 ? "^" + std::to_string(i) : "");
  }
  return os.str();
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "division by the zero polynomial");
  std::vector<Rational> r = a.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {UniPoly(), a};
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
  const Rational inv = Rational(1) / b.leading();
  for (int i = a.degree(); i >= db; --i) {
    const Rational f = r[static_cast<std::size_t>(i)] * inv;
    if (f.is_zero()) continue;
    q[static_cast<std::size_t>(i - db)] = f;
    for (int j = 0; j <= db; ++j) {
      r[static_cast<std::size_t>(i - db + j)] -= f * b.coefficients()[static_cast<std::size_t>(j)];
    }
  }
  r.resize(static_cast<std::size_t>(db));
  return {UniPoly(std::move(q)), UniPoly(std::move(r))};
}

UniPoly gcd(UniPoly a, UniPoly b) {
  while (!b.is_zero()) {
    UniPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

UniPoly squarefree_part(const UniPoly& p) {
  if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "squarefree part of zero");
  if (p.degree() == 0) return UniPoly::constant(1);
  const UniPoly g = gcd(p, p.derivative());
  return divmod(p, g).first.monic();
}

SturmSequence::SturmSequence(const UniPoly& p) {
  if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "Sturm sequence of zero");
  seq_.push_back(p);
  UniPoly d = p.derivative();
  while (!d.is_zero()) {
    seq_.push_back(d);
    const std::size_t n = seq_.size();
    UniPoly r = -divmod(seq_[n - 2], seq_[n - 1]).second;
    // Positive rescaling keeps signs and curbs coefficient growth.
    if (!r.is_zero()) r = (Rational(1) / r.leading().abs()) * r;
    d = std::move(r);
  }
}

int SturmSequence::variations(const Rational& x) const {
  int changes = 0;
  int last = 0;
  for (const auto& p : seq_) {
    const int s = p.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::count(const Rational& a, const Rational& b) const {
  if (!(a < b)) return 0;
  return variations(a) - variations(b);
}

Rational root_bound(const UniPoly& p) {
  if (p.degree() <= 0) return Rational(1);
  Rational m;
  for (int i = 0; i < p.degree(); ++i) {
    const Rational r = (p.coefficients()[static_cast<std::size_t>(i)] / p.leading()).abs();
    if (m < r) m = r;
  }
  return m + Rational(1);
}

int count_roots(const UniPoly& p, const Interval& range) {
  const SturmSequence s(squarefree_part(p));
  return s.count(range.lo(), range.hi()) + (p(range.lo()).is_zero() ? 1 : 0);
}

namespace {

// Roots in (a, b] are counted by the Sturm sequence; exact roots at
// bisection points are emitted as point intervals.
void isolate_rec(const UniPoly& q, const SturmSequence& s, const Rational& a, const Rational& b,
                 int n, std::vector<Interval>& out) {
  if (n == 0) return;
  if (n == 1) {
    if (q(b).is_zero()) {
      out.emplace_back(b, b);
      return;
    }
    // A root at a belongs to the previous interval; the closed interval must exclude it.
    if (!q(a).is_zero()) {
      out.emplace_back(a, b);
      return;
    }
  }
  const Rational m = (a + b) / Rational(2);
  const int left = s.count(a, m);
  isolate_rec(q, s, a, m, left, out);
  isolate_rec(q, s, m, b, n - left, out);
}

}  // namespace

std::vector<Interval> sturm_isolate(const UniPoly& p, const Interval& range) {
  if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "cannot isolate roots of zero");
  std::vector<Interval> out;
  if (p.degree() == 0) return out;
  const UniPoly q = squarefree_part(p);
  const SturmSequence s(q);
  if (q(range.lo()).is_zero()) out.emplace_back(range.lo(), range.lo());
  isolate_rec(q, s, range.lo(), range.hi(), s.count(range.lo(), range.hi()), out);
  // Neighbouring intervals may share an endpoint that is not a root; shrink
  // them until the list is pairwise disjoint.
  bool clash = true;
  while (clash) {
    clash = false;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      if (!(out[i].hi() < out[i + 1].lo())) {
        clash = true;
        out[i] = refine_root(q, out[i], out[i].width() / Rational(2));
        out[i + 1] = refine_root(q, out[i + 1], out[i + 1].width() / Rational(2));
      }
    }
  }
  return out;
}

Interval refine_root(const UniPoly& p, const Interval& iso, const Rational& width) {
  if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "cannot refine roots of zero");
  const UniPoly q = squarefree_part(p);
  Rational a = iso.lo(), b = iso.hi();
  if (q(a).is_zero()) {
    if (a != b && (q(b).is_zero() || SturmSequence(q).count(a, b) != 0)) {
      throw Error(ErrorKind::NotIsolating, "interval holds more than one root");
    }
    return Interval(a, a);
  }
  if (q(b).is_zero()) {
    if (SturmSequence(q).count(a, b) != 1) {
      throw Error(ErrorKind::NotIsolating, "interval holds more than one root");
    }
    return Interval(b, b);
  }
  int sa = q.sign_at(a);
  const int sb = q.sign_at(b);
  if (sa == sb || SturmSequence(q).count(a, b) != 1) {
    throw Error(ErrorKind::NotIsolating, "interval does not isolate exactly one root");
  }
  while (width < b - a) {
    const Rational m = (a + b) / Rational(2);
    const int sm = q.sign_at(m);
    if (sm == 0) return Interval(m, m);
    if (sm == sa) {
      a = m;
      sa = sm;
    } else {
      b = m;
    }
  }
  return Interval(a, b);
}

}  // namespace sabetti
