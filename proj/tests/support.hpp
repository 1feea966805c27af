#pragma once

#include <algorithm>
#include <vector>

#include "sabetti/interval.hpp"
#include "sabetti/linalg.hpp"

namespace sabetti::test {

inline int distinct_in(std::vector<Rational> roots, const Interval& range) {
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return static_cast<int>(std::count_if(roots.begin(), roots.end(),
                                        [&](const Rational& r) { return range.lo() <= r && r <= range.hi(); }));
}

// Textbook Gaussian elimination over Q, independent of the library's
// fraction-free routines.
inline int naive_rank(RatMatrix m) {
  int rank = 0;
  for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
    int pivot = -1;
    for (int r = rank; r < m.rows(); ++r) {
      if (!m(r, c).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    m.row(pivot).swap(m.row(rank));
    for (int r = rank + 1; r < m.rows(); ++r) {
      const Rational f = m(r, c) / m(rank, c);
      for (int j = c; j < m.cols(); ++j) m(r, j) -= f * m(rank, j);
    }
    ++rank;
  }
  return rank;
}

}  // namespace sabetti::test
