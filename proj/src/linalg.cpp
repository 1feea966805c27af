#include "sabetti/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>

namespace sabetti {

int rat_rank(const RatMatrix& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return 0;
  std::vector<std::vector<mpz_class>> a(static_cast<std::size_t>(rows),
                                        std::vector<mpz_class>(static_cast<std::size_t>(cols)));
  for (Eigen::Index i = 0; i < rows; ++i) {
    mpz_class l = 1;
    for (Eigen::Index j = 0; j < cols; ++j) l = lcm(l, m(i, j).den());
    for (Eigen::Index j = 0; j < cols; ++j) {
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j).num() * (l / m(i, j).den());
    }
  }
  std::vector<std::size_t> colperm(static_cast<std::size_t>(cols));
  std::iota(colperm.begin(), colperm.end(), 0);
  mpz_class prev = 1;
  const std::size_t n = a.size(), c = colperm.size();
  std::size_t r = 0;
  for (; r < std::min(n, c); ++r) {
    // Full pivoting: the smallest nonzero entry of the trailing block.
    std::size_t pi = n, pj = c;
    for (std::size_t i = r; i < n; ++i) {
      for (std::size_t j = r; j < c; ++j) {
        const mpz_class& v = a[i][colperm[j]];
        if (v == 0) continue;
        if (pi == n || mpz_cmpabs(v.get_mpz_t(), a[pi][colperm[pj]].get_mpz_t()) < 0) {
          pi = i;
          pj = j;
        }
      }
    }
    if (pi == n) break;
    std::swap(a[r], a[pi]);
    std::swap(colperm[r], colperm[pj]);
    const mpz_class& p = a[r][colperm[r]];
    for (std::size_t i = r + 1; i < n; ++i) {
      const mpz_class f = a[i][colperm[r]];
      for (std::size_t j = r + 1; j < c; ++j) {
        mpz_class& x = a[i][colperm[j]];
        x = x * p - f * a[r][colperm[j]];
        mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][colperm[r]] = 0;
    }
    prev = p;
  }
  return static_cast<int>(r);
}

RatMatrix to_rat(const IntSparse& m) {
  RatMatrix r = RatMatrix::Constant(m.rows(), m.cols(), Rational(0));
  for (int k = 0; k < m.outerSize(); ++k) {
    for (IntSparse::InnerIterator it(m, k); it; ++it) r(it.row(), it.col()) = Rational(static_cast<long>(it.value()));
  }
  return r;
}

namespace {

struct Overflow {};

// Checked 64-bit integer arithmetic; signals overflow by throwing Overflow.
struct Checked {
  using T = std::int64_t;
  static T narrow(__int128 v) {
    if (v > INT64_MAX || v < -INT64_MAX) throw Overflow{};
    return static_cast<T>(v);
  }
  static T from(std::int64_t v) { return v; }
  static T combine(const T& a, const T& x, const T& b, const T& y) {
    return narrow(static_cast<__int128>(a) * x - static_cast<__int128>(b) * y);
  }
  static T scale(const T& a, const T& x) { return narrow(static_cast<__int128>(a) * x); }
  static T gcd(const T& a, const T& b) { return std::gcd(a, b); }
  static T div(const T& a, const T& b) { return a / b; }
  static bool is_zero(const T& a) { return a == 0; }
  static bool is_one(const T& a) { return a == 1; }
  static bool negative(const T& a) { return a < 0; }
};

struct Big {
  using T = mpz_class;
  static T from(std::int64_t v) { return mpz_class(static_cast<long>(v)); }
  static T combine(const T& a, const T& x, const T& b, const T& y) { return a * x - b * y; }
  static T scale(const T& a, const T& x) { return a * x; }
  static T gcd(const T& a, const T& b) { return ::gcd(a, b); }
  static T div(const T& a, const T& b) {
    T r;
    mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
  }
  static bool is_zero(const T& a) { return sgn(a) == 0; }
  static bool is_one(const T& a) { return a == 1; }
  static bool negative(const T& a) { return sgn(a) < 0; }
};

template <typename Ops>
ColumnReduction reduce(const IntSparse& m, const std::vector<bool>& cleared) {
  using T = typename Ops::T;
  using Column = std::vector<std::pair<int, T>>;
  const int cols = static_cast<int>(m.cols());
  std::vector<Column> reduced(static_cast<std::size_t>(cols));
  std::vector<int> owner(static_cast<std::size_t>(m.rows()), -1);
  ColumnReduction out;
  out.pivot_row.assign(static_cast<std::size_t>(cols), -1);
  Column work, merged;
  for (int j = 0; j < cols; ++j) {
    if (!cleared.empty() && cleared[static_cast<std::size_t>(j)]) continue;
    work.clear();
    for (IntSparse::InnerIterator it(m, j); it; ++it) {
      if (it.value() != 0) work.emplace_back(static_cast<int>(it.row()), Ops::from(it.value()));
    }
    while (!work.empty()) {
      const int low = work.back().first;
      const int o = owner[static_cast<std::size_t>(low)];
      if (o < 0) break;
      const Column& p = reduced[static_cast<std::size_t>(o)];
      // work <- (pb/g) * work - (wb/g) * p, cancelling the lowest entry.
      const T g = Ops::gcd(work.back().second, p.back().second);
      const T a = Ops::div(p.back().second, g);
      const T b = Ops::div(work.back().second, g);
      merged.clear();
      std::size_t x = 0, y = 0;
      const T zero = Ops::from(0);
      while (x < work.size() || y < p.size()) {
        if (y == p.size() || (x < work.size() && work[x].first < p[y].first)) {
          merged.emplace_back(work[x].first, Ops::scale(a, work[x].second));
          ++x;
        } else if (x == work.size() || p[y].first < work[x].first) {
          merged.emplace_back(p[y].first, Ops::combine(a, zero, b, p[y].second));
          ++y;
        } else {
          T v = Ops::combine(a, work[x].second, b, p[y].second);
          if (!Ops::is_zero(v)) merged.emplace_back(work[x].first, std::move(v));
          ++x;
          ++y;
        }
      }
      std::swap(work, merged);
      if (work.empty()) break;
      T content = Ops::from(0);
      for (const auto& e : work) {
        content = Ops::gcd(content, e.second);
        if (Ops::is_one(content)) break;
      }
      if (Ops::negative(content)) content = Ops::combine(Ops::from(0), zero, Ops::from(1), content);
      if (!Ops::is_one(content)) {
        for (auto& e : work) e.second = Ops::div(e.second, content);
      }
    }
    if (!work.empty()) {
      owner[static_cast<std::size_t>(work.back().first)] = j;
      out.pivot_row[static_cast<std::size_t>(j)] = work.back().first;
      ++out.rank;
      reduced[static_cast<std::size_t>(j)] = std::move(work);
      work = Column{};
    }
  }
  return out;
}

}  // namespace

ColumnReduction reduce_columns(const IntSparse& m, const std::vector<bool>& cleared) {
  try {
    return reduce<Checked>(m, cleared);
  } catch (const Overflow&) {
    return reduce<Big>(m, cleared);
  }
}

}  // namespace sabetti
