#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sabetti/interval.hpp"
#include "sabetti/multipoly.hpp"

namespace sabetti {

using CellIndex = std::array<std::int64_t, 3>;

/// A polynomial rewritten in half-cell units of a uniform grid: with
/// x = lo + h v and h = width / (2 * resolution), the stored form is
/// Q(v) = den * p(x) with integer coefficients, so a cell range [lo, hi)
/// is v in [2 lo, 2 hi] with integer midpoint lo + hi.
class GridPoly {
 public:
  GridPoly(const MultiPoly& p, const Box& root, std::int64_t resolution);

  /// Enclosure of p over the cells lo..hi-1 on every axis: the Taylor form
  /// at the midpoint intersected with the natural form in grid units.
  /// Exact; uses 128-bit integers and falls back to GMP on overflow.
  Interval enclosure(const CellIndex& lo, const CellIndex& hi) const;

 private:
  template <class T>
  void bounds(const CellIndex& lo, const CellIndex& hi, T& out_lo, T& out_hi) const;

  int k_;
  std::array<int, 3> deg_{0, 0, 0};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::vector<std::array<int, 3>> alpha_;
  std::vector<mpz_class> coef_;
  std::vector<__int128> coef128_;
  bool small_ = true;
  mpz_class den_;
};

}  // namespace sabetti
