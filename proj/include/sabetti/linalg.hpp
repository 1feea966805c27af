#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "sabetti/rational.hpp"

namespace sabetti {

using RatMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using IntSparse = Eigen::SparseMatrix<std::int64_t, Eigen::ColMajor, int>;

/// Exact rank over Q. Rows are scaled to integers, then reduced by Bareiss
/// fraction-free elimination with full pivoting.
int rat_rank(const RatMatrix& m);

RatMatrix to_rat(const IntSparse& m);

/// Result of the column reduction of an integer matrix over Q.
struct ColumnReduction {
  int rank = 0;
  /// Lowest nonzero row of each reduced column, -1 for columns reduced to zero.
  std::vector<int> pivot_row;
};

/// Left-to-right column reduction keyed on the lowest nonzero row, fraction
/// free with content removal. Columns flagged in `cleared` are known to reduce
/// to zero and are skipped. Runs in 64-bit arithmetic and restarts with GMP
/// integers if an intermediate would overflow.
ColumnReduction reduce_columns(const IntSparse& m, const std::vector<bool>& cleared = {});

inline int sparse_rank(const IntSparse& m) { return reduce_columns(m).rank; }

}  // namespace sabetti
