#include "sabetti/grid_poly.hpp"

#include <algorithm>

#include "sabetti/error.hpp"

namespace sabetti {

namespace {

struct Overflow {};

void add_to(__int128& a, const __int128& b) {
  if (__builtin_add_overflow(a, b, &a)) throw Overflow{};
}
__int128 times(const __int128& a, const __int128& b) {
  __int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
__int128 magnitude(const __int128& a) {
  if (a == std::numeric_limits<__int128>::min()) throw Overflow{};
  return a < 0 ? -a : a;
}
void add_to(mpz_class& a, const mpz_class& b) { a += b; }
mpz_class times(const mpz_class& a, const mpz_class& b) { return a * b; }
mpz_class magnitude(const mpz_class& a) { return abs(a); }

template <class T>
T from_int(std::int64_t v) {
  if constexpr (std::is_same_v<T, mpz_class>) {
    return mpz_class(static_cast<long>(v));
  } else {
    return static_cast<T>(v);
  }
}

mpz_class to_mpz(__int128 v) {
  const bool neg = v < 0;
  // Magnitude as unsigned; the minimum value is never produced (checked ops).
  const unsigned __int128 m = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(m >> 64));
  mpz_class out = (hi << 64) + mpz_class(static_cast<unsigned long>(static_cast<std::uint64_t>(m)));
  return neg ? mpz_class(-out) : out;
}

bool fits_int128(const mpz_class& v) { return mpz_sizeinbase(v.get_mpz_t(), 2) <= 120; }

__int128 to_int128(const mpz_class& v) {
  const mpz_class m = abs(v);
  const mpz_class hi = m >> 64;
  const mpz_class lo = m - (hi << 64);
  const unsigned __int128 u = (static_cast<unsigned __int128>(hi.get_ui()) << 64) | lo.get_ui();
  const auto s = static_cast<__int128>(u);
  return v < 0 ? -s : s;
}

}  // namespace

GridPoly::GridPoly(const MultiPoly& p, const Box& root, std::int64_t resolution) : k_(p.variable_count()) {
  if (static_cast<int>(root.size()) != k_ || k_ > 3) {
    throw Error(ErrorKind::DimensionMismatch, "grid polynomial needs a box of matching dimension <= 3");
  }
  std::vector<Rational> corner, step;
  for (const Interval& iv : root) {
    corner.push_back(iv.lo());
    step.push_back(iv.width() / Rational(mpz_class(2 * static_cast<long>(resolution))));
  }
  const MultiPoly shifted = p.translate(corner);
  std::vector<Term> terms;
  for (const Term& t : shifted.terms()) {
    Rational c = t.coef;
    for (int a = 0; a < k_; ++a) {
      const auto u = static_cast<std::size_t>(a);
      c *= pow(step[u], static_cast<unsigned>(t.exps[u]));
      deg_[u] = std::max(deg_[u], t.exps[u]);
    }
    terms.push_back(Term{t.exps, c});
  }
  den_ = 1;
  for (const Term& t : terms) mpz_lcm(den_.get_mpz_t(), den_.get_mpz_t(), t.coef.den().get_mpz_t());
  std::size_t size = 1;
  for (int a = 0; a < k_; ++a) {
    stride_[static_cast<std::size_t>(a)] = size;
    size *= static_cast<std::size_t>(deg_[static_cast<std::size_t>(a)] + 1);
  }
  coef_.assign(size, mpz_class(0));
  for (const Term& t : terms) {
    std::size_t idx = 0;
    for (int a = 0; a < k_; ++a) idx += static_cast<std::size_t>(t.exps[static_cast<std::size_t>(a)]) * stride_[static_cast<std::size_t>(a)];
    coef_[idx] = t.coef.num() * (den_ / t.coef.den());
  }
  alpha_.resize(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rest = idx;
    for (int a = k_ - 1; a >= 0; --a) {
      const auto u = static_cast<std::size_t>(a);
      alpha_[idx][u] = static_cast<int>(rest / stride_[u]);
      rest %= stride_[u];
    }
  }
  for (const mpz_class& c : coef_) small_ = small_ && fits_int128(c);
  if (small_) {
    for (const mpz_class& c : coef_) coef128_.push_back(to_int128(c));
  }
}

template <class T>
void GridPoly::bounds(const CellIndex& lo, const CellIndex& hi, T& out_lo, T& out_hi) const {
  std::vector<T> c;
  if constexpr (std::is_same_v<T, mpz_class>) {
    c = coef_;
  } else {
    c = coef128_;
  }
  const std::size_t size = c.size();
  // Taylor shift to the midpoint, one axis at a time.
  for (int a = 0; a < k_; ++a) {
    const auto u = static_cast<std::size_t>(a);
    const T m = from_int<T>(lo[u] + hi[u]);
    const int d = deg_[u];
    if (d == 0 || lo[u] + hi[u] == 0) continue;
    for (std::size_t base = 0; base < size; ++base) {
      if (alpha_[base][u] != 0) continue;
      for (int i = 0; i < d; ++i) {
        for (int j = d - 1; j >= i; --j) {
          add_to(c[base + static_cast<std::size_t>(j) * stride_[u]],
                 times(m, c[base + static_cast<std::size_t>(j + 1) * stride_[u]]));
        }
      }
    }
  }
  std::array<std::vector<T>, 3> rpow, vlo, vhi;
  for (int a = 0; a < k_; ++a) {
    const auto u = static_cast<std::size_t>(a);
    rpow[u].push_back(from_int<T>(1));
    vlo[u].push_back(from_int<T>(1));
    vhi[u].push_back(from_int<T>(1));
    for (int e = 1; e <= deg_[u]; ++e) {
      rpow[u].push_back(times(rpow[u].back(), from_int<T>(hi[u] - lo[u])));
      vlo[u].push_back(times(vlo[u].back(), from_int<T>(2 * lo[u])));
      vhi[u].push_back(times(vhi[u].back(), from_int<T>(2 * hi[u])));
    }
  }
  T clo = c[0], chi = c[0], nlo = from_int<T>(0), nhi = from_int<T>(0);
  const auto& orig = [&]() -> const std::vector<T>& {
    if constexpr (std::is_same_v<T, mpz_class>) {
      return coef_;
    } else {
      return coef128_;
    }
  }();
  for (std::size_t idx = 0; idx < size; ++idx) {
    const auto& al = alpha_[idx];
    // Natural form in grid units: v >= 0, so monomials are monotone.
    if (orig[idx] != 0) {
      T plo = from_int<T>(1), phi = from_int<T>(1);
      for (int a = 0; a < k_; ++a) {
        const auto u = static_cast<std::size_t>(a);
        if (al[u] == 0) continue;
        plo = times(plo, vlo[u][static_cast<std::size_t>(al[u])]);
        phi = times(phi, vhi[u][static_cast<std::size_t>(al[u])]);
      }
      if (orig[idx] > 0) {
        add_to(nlo, times(orig[idx], plo));
        add_to(nhi, times(orig[idx], phi));
      } else {
        add_to(nlo, times(orig[idx], phi));
        add_to(nhi, times(orig[idx], plo));
      }
    }
    if (idx == 0 || c[idx] == 0) continue;
    T mag = magnitude(c[idx]);
    bool even = true;
    for (int a = 0; a < k_; ++a) {
      const auto u = static_cast<std::size_t>(a);
      if (al[u] == 0) continue;
      mag = times(mag, rpow[u][static_cast<std::size_t>(al[u])]);
      even = even && al[u] % 2 == 0;
    }
    if (!even) {
      add_to(clo, -mag);
      add_to(chi, mag);
    } else if (c[idx] > 0) {
      add_to(chi, mag);
    } else {
      add_to(clo, -mag);
    }
  }
  out_lo = std::max(clo, nlo);
  out_hi = std::min(chi, nhi);
}

Interval GridPoly::enclosure(const CellIndex& lo, const CellIndex& hi) const {
  if (small_) {
    try {
      __int128 a = 0, b = 0;
      bounds(lo, hi, a, b);
      return Interval(Rational(to_mpz(a), den_), Rational(to_mpz(b), den_));
    } catch (const Overflow&) {
    }
  }
  mpz_class a, b;
  bounds(lo, hi, a, b);
  return Interval(Rational(a, den_), Rational(b, den_));
}

}  // namespace sabetti
