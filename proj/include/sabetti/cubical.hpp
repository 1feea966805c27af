#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sabetti/formula.hpp"
#include "sabetti/interval.hpp"

namespace sabetti {

/// Uniform grid of resolution^k closed cells over a box. Cell linear index
/// is c_0 + res*c_1 + res^2*c_2 (last axis slowest).
class Grid {
 public:
  Grid(Box box, int resolution);

  int dimension() const { return static_cast<int>(box_.size()); }
  int resolution() const { return res_; }
  const Box& box() const { return box_; }
  std::int64_t cell_count() const { return cells_; }
  /// Coordinate of grid line i (0..res) on an axis.
  const Rational& line(int axis, int i) const { return lines_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(i)]; }

  std::array<int, 3> coords(std::int64_t cell) const;
  std::int64_t index(const std::array<int, 3>& c) const;
  Box cell_box(std::int64_t cell) const;
  /// Box spanned by cells lo..hi-1 on every axis.
  Box region_box(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const;
  Point cell_center(std::int64_t cell) const;

 private:
  Box box_;
  int res_;
  std::int64_t cells_;
  std::vector<std::vector<Rational>> lines_;
};

/// Labels every grid cell by adaptive subdivision: a region is split only
/// while its label is UNKNOWN, and atoms decided on a region are inherited by
/// its sub-regions. Each label is sound for the closed cell.
std::vector<BoxLabel> label_cells(const Formula& f, const Grid& grid, Enclosure enclosure = Enclosure::Centered);

enum class RasterMode { INNER, OUTER };

struct CubicalComplex {
  Grid grid;
  /// Sorted linear indices of the full-dimensional cubes.
  std::vector<std::int64_t> cubes;
  int dimension() const { return grid.dimension(); }
};

CubicalComplex rasterize(const Formula& f, const Box& box, int resolution, RasterMode mode);
/// Builds the complex from precomputed labels.
CubicalComplex complex_from_labels(const Grid& grid, const std::vector<BoxLabel>& labels, RasterMode mode);

struct BettiNumbers {
  int b0 = 0;
  int b1 = 0;
  int b2 = 0;
  friend bool operator==(const BettiNumbers&, const BettiNumbers&) = default;
};

struct CubicalHomology {
  /// Number of i-cells, i = 0..3.
  std::array<std::int64_t, 4> cells{};
  /// Rank of the boundary map from i-cells to (i-1)-cells.
  std::array<std::int64_t, 4> ranks{};
  BettiNumbers betti;
};

CubicalHomology cubical_homology(const CubicalComplex& c);
inline BettiNumbers cubical_betti(const CubicalComplex& c) { return cubical_homology(c).betti; }

struct OracleReading {
  int resolution = 0;
  BettiNumbers inner;
  BettiNumbers outer;
};

struct StableBetti {
  int b0 = 0;
  int b1 = 0;
  bool converged = false;
  /// Resolution at which the accepted reading was first seen.
  int resolution = 0;
  std::vector<OracleReading> readings;
};

/// Resolutions 8, 16, ... up to max_resolution. For a negation-free formula
/// with only non-strict atoms, accepts the first r where INNER and OUTER
/// agree at r and at 2r. Otherwise the outer approximation may contain
/// boundary points the set lacks, so the inner reading alone must repeat at
/// r and 2r.
StableBetti stable_betti(const Formula& f, const Box& box, int max_resolution);

/// Plain-text dump: header "k resolution origin step", then one cube per
/// line as integer coordinates.
void write_complex(std::ostream& os, const CubicalComplex& c);

}  // namespace sabetti
