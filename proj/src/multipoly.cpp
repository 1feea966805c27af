#include "sabetti/multipoly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "sabetti/error.hpp"

namespace sabetti {

namespace {

bool divides(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

// Binomial coefficients for small n, exact.
Rational binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(r);
}

}  // namespace

MultiPoly::MultiPoly(int variable_count, std::vector<Term> terms)
    : k_(variable_count), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (static_cast<int>(t.exps.size()) != k_) {
      throw Error(ErrorKind::DimensionMismatch, "exponent vector length differs from variable count");
    }
  }
  normalize();
}

void MultiPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.exps < b.exps; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().exps == t.exps) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef.is_zero(); });
  terms_ = std::move(merged);
}

MultiPoly MultiPoly::constant(int variable_count, const Rational& c) {
  return MultiPoly(variable_count, {Term{Exponents(static_cast<std::size_t>(variable_count), 0), c}});
}

MultiPoly MultiPoly::variable(int variable_count, int index) {
  if (index < 0 || index >= variable_count) throw Error(ErrorKind::ArityError, "variable index out of range");
  Exponents e(static_cast<std::size_t>(variable_count), 0);
  e[static_cast<std::size_t>(index)] = 1;
  return MultiPoly(variable_count, {Term{std::move(e), Rational(1)}});
}

MultiPoly MultiPoly::monomial(int variable_count, const Rational& c, Exponents exps) {
  return MultiPoly(variable_count, {Term{std::move(exps), c}});
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && std::all_of(terms_[0].exps.begin(), terms_[0].exps.end(),
                                                              [](int e) { return e == 0; }));
}

Rational MultiPoly::constant_term() const {
  if (!terms_.empty() && std::all_of(terms_[0].exps.begin(), terms_[0].exps.end(), [](int e) { return e == 0; })) {
    return terms_[0].coef;
  }
  return Rational(0);
}

int MultiPoly::degree() const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

int MultiPoly::degree_in(int var) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& t : terms_) d = std::max(d, t.exps[static_cast<std::size_t>(var)]);
  return d;
}

Rational MultiPoly::operator()(const std::vector<Rational>& point) const {
  if (static_cast<int>(point.size()) != k_) {
    throw Error(ErrorKind::DimensionMismatch, "point dimension differs from variable count");
  }
  std::vector<std::vector<Rational>> powers(point.size());
  auto power = [&](std::size_t var, int e) -> const Rational& {
    auto& cache = powers[var];
    if (cache.empty()) cache.push_back(Rational(1));
    while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * point[var]);
    return cache[static_cast<std::size_t>(e)];
  };
  Rational acc;
  for (const auto& t : terms_) {
    Rational m = t.coef;
    for (std::size_t i = 0; i < t.exps.size(); ++i) {
      if (t.exps[i] != 0) m *= power(i, t.exps[i]);
    }
    acc += m;
  }
  return acc;
}

MultiPoly MultiPoly::derivative(int var) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    const int e = t.exps[static_cast<std::size_t>(var)];
    if (e == 0) continue;
    Term d = t;
    d.exps[static_cast<std::size_t>(var)] = e - 1;
    d.coef *= Rational(e);
    out.push_back(std::move(d));
  }
  return MultiPoly(k_, std::move(out));
}

MultiPoly MultiPoly::substitute(int var, const Rational& value) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Term s = t;
    const int e = s.exps[static_cast<std::size_t>(var)];
    if (e != 0) {
      s.coef *= pow(value, static_cast<unsigned>(e));
      s.exps[static_cast<std::size_t>(var)] = 0;
    }
    out.push_back(std::move(s));
  }
  return MultiPoly(k_, std::move(out));
}

MultiPoly MultiPoly::translate(const std::vector<Rational>& shift) const {
  if (static_cast<int>(shift.size()) != k_) {
    throw Error(ErrorKind::DimensionMismatch, "shift dimension differs from variable count");
  }
  std::vector<Term> cur = terms_;
  for (std::size_t var = 0; var < shift.size(); ++var) {
    if (shift[var].is_zero()) continue;
    std::map<Exponents, Rational> acc;
    std::vector<Rational> cpow{Rational(1)};
    for (const auto& t : cur) {
      const int e = t.exps[var];
      while (static_cast<int>(cpow.size()) <= e) cpow.push_back(cpow.back() * shift[var]);
      for (int i = 0; i <= e; ++i) {
        Exponents ex = t.exps;
        ex[var] = i;
        acc[ex] += t.coef * binomial(e, i) * cpow[static_cast<std::size_t>(e - i)];
      }
    }
    cur.clear();
    for (auto& [ex, c] : acc) cur.push_back(Term{ex, c});
  }
  return MultiPoly(k_, std::move(cur));
}

std::vector<MultiPoly> MultiPoly::coefficients_in(int var) const {
  const int d = degree_in(var);
  std::vector<std::vector<Term>> buckets(static_cast<std::size_t>(std::max(d, -1) + 1));
  for (const auto& t : terms_) {
    Term s = t;
    const int e = s.exps[static_cast<std::size_t>(var)];
    s.exps[static_cast<std::size_t>(var)] = 0;
    buckets[static_cast<std::size_t>(e)].push_back(std::move(s));
  }
  std::vector<MultiPoly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.emplace_back(k_, std::move(b));
  return out;
}

UniPoly MultiPoly::to_unipoly(int var) const {
  std::vector<Rational> c(static_cast<std::size_t>(std::max(degree_in(var), -1) + 1));
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < t.exps.size(); ++i) {
      if (static_cast<int>(i) != var && t.exps[i] != 0) {
        throw Error(ErrorKind::InvalidArgument, "polynomial depends on more than one variable");
      }
    }
    c[static_cast<std::size_t>(t.exps[static_cast<std::size_t>(var)])] += t.coef;
  }
  return UniPoly(std::move(c));
}

MultiPoly MultiPoly::from_unipoly(int variable_count, int var, const UniPoly& p) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < p.coefficients().size(); ++i) {
    Exponents e(static_cast<std::size_t>(variable_count), 0);
    e[static_cast<std::size_t>(var)] = static_cast<int>(i);
    terms.push_back(Term{std::move(e), p.coefficients()[i]});
  }
  return MultiPoly(variable_count, std::move(terms));
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (o.k_ != k_ && !o.is_zero()) {
    if (is_zero() && terms_.empty()) k_ = o.k_;
    else throw Error(ErrorKind::DimensionMismatch, "adding polynomials in different rings");
  }
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  normalize();
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) { return *this += -o; }

MultiPoly operator-(const MultiPoly& a) {
  MultiPoly r = a;
  for (auto& t : r.terms_) t.coef = -t.coef;
  return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.k_ != b.k_) throw Error(ErrorKind::DimensionMismatch, "multiplying polynomials in different rings");
  std::vector<Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      Exponents e = s.exps;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += t.exps[i];
      out.push_back(Term{std::move(e), s.coef * t.coef});
    }
  }
  return MultiPoly(a.k_, std::move(out));
}

MultiPoly operator*(const Rational& s, const MultiPoly& a) {
  if (s.is_zero()) return MultiPoly(a.k_);
  MultiPoly r = a;
  for (auto& t : r.terms_) t.coef *= s;
  return r;
}

bool operator<(const MultiPoly& a, const MultiPoly& b) {
  if (a.k_ != b.k_) return a.k_ < b.k_;
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.terms_[i].exps != b.terms_[i].exps) return a.terms_[i].exps < b.terms_[i].exps;
    if (a.terms_[i].coef != b.terms_[i].coef) return a.terms_[i].coef < b.terms_[i].coef;
  }
  return a.terms_.size() < b.terms_.size();
}

std::string MultiPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& t = *it;
    if (!first) os << (t.coef.sign() < 0 ? " - " : " + ");
    else if (t.coef.sign() < 0) os << "-";
    first = false;
    const Rational a = t.coef.abs();
    bool any = false;
    std::ostringstream mono;
    for (std::size_t i = 0; i < t.exps.size(); ++i) {
      if (t.exps[i] == 0) continue;
      if (any) mono << "*";
      mono << "x" << (i + 1);
      if (t.exps[i] > 1) mono << "^" << t.exps[i];
      any = true;
    }
    if (!any) os << a;
    else if (a == Rational(1)) os << mono.str();
    else os << a << "*" << mono.str();
  }
  return os.str();
}

MultiPoly pow(const MultiPoly& p, unsigned n) {
  MultiPoly result = MultiPoly::constant(p.variable_count(), 1);
  MultiPoly base = p;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

std::size_t hash_value(const MultiPoly& p) {
  std::size_t h = static_cast<std::size_t>(p.variable_count());
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& t : p.terms()) {
    for (int e : t.exps) mix(static_cast<std::size_t>(e));
    mix(hash_value(t.coef));
  }
  return h;
}

MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b) {
  if (b.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "division by the zero polynomial");
  const int k = a.variable_count();
  MultiPoly q(k);
  MultiPoly r = a;
  const Term& lb = b.leading_term();
  while (!r.is_zero()) {
    const Term& lr = r.leading_term();
    if (!divides(lb.exps, lr.exps)) {
      throw Error(ErrorKind::InvalidArgument, "polynomial division is not exact");
    }
    Exponents e = lr.exps;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= lb.exps[i];
    const MultiPoly t = MultiPoly::monomial(k, lr.coef / lb.coef, std::move(e));
    q += t;
    r -= t * b;
  }
  return q;
}

Interval eval_interval(const MultiPoly& p, const Box& box) {
  if (static_cast<int>(box.size()) != p.variable_count()) {
    throw Error(ErrorKind::DimensionMismatch, "box dimension differs from variable count");
  }
  std::vector<std::vector<Interval>> powers(box.size());
  auto power = [&](std::size_t var, int e) -> const Interval& {
    auto& cache = powers[var];
    while (static_cast<int>(cache.size()) <= e) {
      cache.push_back(pow(box[var], static_cast<unsigned>(cache.size())));
    }
    return cache[static_cast<std::size_t>(e)];
  };
  Interval acc(Rational(0));
  for (const auto& t : p.terms()) {
    Interval m(Rational(1));
    bool constant = true;
    for (std::size_t i = 0; i < t.exps.size(); ++i) {
      if (t.exps[i] == 0) continue;
      m = constant ? power(i, t.exps[i]) : m * power(i, t.exps[i]);
      constant = false;
    }
    acc += t.coef * m;
  }
  return acc;
}

Interval eval_interval_centered(const MultiPoly& p, const Box& box) {
  if (static_cast<int>(box.size()) != p.variable_count()) {
    throw Error(ErrorKind::DimensionMismatch, "box dimension differs from variable count");
  }
  const Point mid = box_midpoint(box);
  std::vector<Rational> radius;
  radius.reserve(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) radius.push_back(box[i].hi() - mid[i]);
  const MultiPoly shifted = p.translate(mid);
  Rational lo, hi;
  for (const auto& t : shifted.terms()) {
    Rational mag = t.coef.abs();
    bool even = true;
    bool constant = true;
    for (std::size_t i = 0; i < t.exps.size(); ++i) {
      if (t.exps[i] == 0) continue;
      constant = false;
      mag *= pow(radius[i], static_cast<unsigned>(t.exps[i]));
      if (t.exps[i] % 2 != 0) even = false;
    }
    if (constant) {
      lo += t.coef;
      hi += t.coef;
    } else if (!even) {
      lo -= mag;
      hi += mag;
    } else if (t.coef.sign() > 0) {
      hi += mag;
    } else {
      lo -= mag;
    }
  }
  const Interval natural = eval_interval(p, box);
  return Interval(max(lo, natural.lo()), min(hi, natural.hi()));
}

namespace {

// Polynomial in one distinguished variable with coefficients in the full ring.
using Coeffs = std::vector<MultiPoly>;

int deg(const Coeffs& c) { return static_cast<int>(c.size()) - 1; }

void trim(Coeffs& c) {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
}

Coeffs scale(const Coeffs& c, const MultiPoly& s) {
  Coeffs out;
  out.reserve(c.size());
  for (const auto& x : c) out.push_back(x * s);
  trim(out);
  return out;
}

Coeffs divide_all(const Coeffs& c, const MultiPoly& s) {
  Coeffs out;
  out.reserve(c.size());
  for (const auto& x : c) out.push_back(exact_divide(x, s));
  trim(out);
  return out;
}

// lc(B)^(deg A - deg B + 1) * A mod B.
Coeffs pseudo_remainder(Coeffs a, const Coeffs& b) {
  const int db = deg(b);
  int e = deg(a) - db + 1;
  const MultiPoly& lb = b.back();
  while (!a.empty() && deg(a) >= db) {
    const MultiPoly lr = a.back();
    const int shift = deg(a) - db;
    a = scale(a, lb);
    for (int j = 0; j <= db; ++j) a[static_cast<std::size_t>(j + shift)] -= lr * b[static_cast<std::size_t>(j)];
    trim(a);
    --e;
  }
  if (e > 0) a = scale(a, pow(lb, static_cast<unsigned>(e)));
  return a;
}

}  // namespace

MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, int var) {
  const int k = p.variable_count();
  if (q.variable_count() != k) throw Error(ErrorKind::DimensionMismatch, "resultant of polynomials in different rings");
  if (p.degree_in(var) <= 0 || q.degree_in(var) <= 0) {
    throw Error(ErrorKind::DegenerateDegree, "resultant needs positive degree in the eliminated variable");
  }
  Coeffs a = p.coefficients_in(var);
  Coeffs b = q.coefficients_in(var);
  MultiPoly s = MultiPoly::constant(k, 1);
  if (deg(a) < deg(b)) {
    std::swap(a, b);
    if (deg(a) % 2 == 1 && deg(b) % 2 == 1) s = -s;
  }
  MultiPoly g = MultiPoly::constant(k, 1);
  MultiPoly h = MultiPoly::constant(k, 1);
  while (true) {
    const int delta = deg(a) - deg(b);
    if (deg(a) % 2 == 1 && deg(b) % 2 == 1) s = -s;
    Coeffs r = pseudo_remainder(a, b);
    a = b;
    if (r.empty()) return MultiPoly(k);
    b = divide_all(r, g * pow(h, static_cast<unsigned>(delta)));
    g = a.back();
    if (delta > 0) {
      h = exact_divide(pow(g, static_cast<unsigned>(delta)), pow(h, static_cast<unsigned>(delta - 1)));
    }
    if (deg(b) <= 0) break;
  }
  // b is a nonzero constant in var.
  const int da = deg(a);
  MultiPoly lb = b.back();
  MultiPoly num = pow(lb, static_cast<unsigned>(da));
  MultiPoly res = da >= 1 ? exact_divide(num, pow(h, static_cast<unsigned>(da - 1))) : num;
  return s * res;
}

MultiPoly sylvester_resultant(const MultiPoly& p, const MultiPoly& q, int var) {
  const int k = p.variable_count();
  const int m = p.degree_in(var);
  const int n = q.degree_in(var);
  if (m <= 0 || n <= 0) {
    throw Error(ErrorKind::DegenerateDegree, "resultant needs positive degree in the eliminated variable");
  }
  const Coeffs a = p.coefficients_in(var);
  const Coeffs b = q.coefficients_in(var);
  const int size = m + n;
  std::vector<std::vector<MultiPoly>> M(static_cast<std::size_t>(size),
                                        std::vector<MultiPoly>(static_cast<std::size_t>(size), MultiPoly(k)));
  // Rows 0..n-1 carry shifted copies of p, rows n..n+m-1 of q; highest degree first.
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j <= m; ++j) M[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + j)] = a[static_cast<std::size_t>(m - j)];
  }
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j <= n; ++j) M[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + j)] = b[static_cast<std::size_t>(n - j)];
  }
  MultiPoly prev = MultiPoly::constant(k, 1);
  int sign = 1;
  for (int c = 0; c < size - 1; ++c) {
    std::size_t cu = static_cast<std::size_t>(c);
    if (M[cu][cu].is_zero()) {
      std::size_t swap_row = cu;
      for (std::size_t r = cu + 1; r < M.size(); ++r) {
        if (!M[r][cu].is_zero()) {
          swap_row = r;
          break;
        }
      }
      if (swap_row == cu) return MultiPoly(k);
      std::swap(M[cu], M[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = cu + 1; i < M.size(); ++i) {
      for (std::size_t j = cu + 1; j < M.size(); ++j) {
        M[i][j] = exact_divide(M[i][j] * M[cu][cu] - M[i][cu] * M[cu][j], prev);
      }
      M[i][cu] = MultiPoly(k);
    }
    prev = M[cu][cu];
  }
  MultiPoly det = M.back().back();
  return sign > 0 ? det : -det;
}

}  // namespace sabetti
