#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sabetti/cubical.hpp"
#include "sabetti/formula.hpp"

namespace sabetti {

/// Integer coordinates in units of the finest grid (2^max_depth cells per axis).
using Lattice = std::array<std::int64_t, 3>;

/// Adaptive dyadic subdivision of a root box labelled against several
/// formulas at once. A node is split while some formula is UNKNOWN on it and
/// the depth limit is not reached, or while it is shallower than min_depth.
/// Leaves tile the root box; the finest leaves are the cells of the uniform
/// grid with 2^max_depth cells per axis, so every union of leaves is exactly
/// a union of cells of that grid.
class DyadicRaster {
 public:
  struct Leaf {
    int level;
    Lattice lo;
    std::int64_t size;
  };

  /// Nodes that straddle the boundary of a cut (a lattice box) are split as
  /// well, so every cut is a union of leaves.
  DyadicRaster(std::vector<Formula> formulas, Box root, int max_depth, int min_depth = 0,
               Enclosure enclosure = Enclosure::Centered, std::vector<std::pair<Lattice, Lattice>> cuts = {});

  int dimension() const { return k_; }
  int max_depth() const { return depth_; }
  const Box& root() const { return root_; }
  std::size_t formula_count() const { return formulas_.size(); }
  const std::vector<Leaf>& leaves() const { return leaves_; }
  BoxLabel label(std::size_t leaf, std::size_t formula) const {
    return labels_[leaf * formulas_.size() + formula];
  }

  /// Exact coordinate of finest grid line i on an axis.
  Rational coordinate(int axis, std::int64_t i) const;
  Box box(const Lattice& lo, const Lattice& hi) const;
  Box leaf_box(std::size_t leaf) const;

  /// Leaf id of the tree node (level, node coordinates), -1 if the node is
  /// internal, and nullopt if no such node exists.
  std::optional<int> node(int level, const Lattice& coords) const;
  /// Leaves below a node form the contiguous id range [first, last).
  std::pair<int, int> leaf_range(int level, const Lattice& coords) const;
  /// Lattice coordinates of a box whose faces lie on finest grid lines.
  std::optional<std::pair<Lattice, Lattice>> lattice_box(const Box& b) const;
  bool leaf_inside(std::size_t leaf, const Lattice& lo, const Lattice& hi) const;

 private:
  void build(int level, const Lattice& coords, std::vector<BoxLabel> decided,
             std::vector<std::vector<BoxLabel>> states);
  static std::uint64_t key(int level, const Lattice& c);

  int k_;
  int depth_;
  int min_depth_;
  bool centered_ = true;
  Box root_;
  std::vector<Formula> formulas_;
  std::vector<BoxClassifier> classifiers_;
  std::vector<Leaf> leaves_;
  std::vector<BoxLabel> labels_;
  std::unordered_map<std::uint64_t, int> nodes_;
  std::vector<Rational> step_;
  std::vector<std::pair<Lattice, Lattice>> cuts_;
};

/// Cell structure on a union of closed leaves. Every cell is the relative
/// interior of a face of the smallest leaf containing it, which makes the
/// cells a regular cell decomposition even where leaves of different sizes
/// meet. Cells are oriented as axis-aligned boxes, so boundaries carry the
/// usual cubical signs.
class LeafComplex {
 public:
  struct Cell {
    Lattice lo;
    Lattice hi;
    int dim;
    /// Selected leaves whose closed box contains the cell.
    std::vector<int> leaves;
  };

  LeafComplex(const DyadicRaster& raster, const std::vector<bool>& selected);

  int dimension() const { return k_; }
  const std::vector<Cell>& cells() const { return cells_; }
  /// Faces of a cell with incidence numbers.
  const std::vector<std::pair<int, int>>& boundary(std::size_t cell) const { return boundary_[cell]; }

  /// Cells contained in the leaf, or empty if the leaf was not selected.
  const std::vector<int>& cells_of_leaf(std::size_t leaf) const { return leaf_cells_[leaf]; }
  /// Sorted cells of the union of the given closed leaves.
  std::vector<int> cells_of_leaves(const std::vector<int>& leaves) const;

  CubicalHomology homology() const;
  /// Homology of a subcomplex given as a sorted list of cells closed under faces.
  CubicalHomology homology(const std::vector<int>& cells) const;

  struct Components {
    int count = 0;
    /// (vertex cell, component label) sorted by vertex.
    std::vector<std::pair<int, int>> vertex_label;
    int label_of(int vertex) const;
  };
  /// Connected components of a subcomplex (only its vertices and edges matter).
  Components components(const std::vector<int>& cells) const;

 private:
  int find_cell(const Lattice& lo, const Lattice& hi) const;
  void collect_faces(const Lattice& lo, const Lattice& hi, int sign, std::vector<std::pair<int, int>>& out) const;

  int k_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::pair<int, int>>> boundary_;
  std::vector<std::vector<int>> leaf_cells_;
  struct KeyHash {
    std::size_t operator()(unsigned __int128 x) const {
      const auto lo = static_cast<std::uint64_t>(x), hi = static_cast<std::uint64_t>(x >> 64);
      return std::hash<std::uint64_t>{}(lo ^ (hi * 0x9e3779b97f4a7c15ULL));
    }
  };
  static unsigned __int128 key(const Lattice& lo, const Lattice& hi);

  std::unordered_map<unsigned __int128, int, KeyHash> index_;
};

/// Homology of the inner (INSIDE leaves) or outer (INSIDE and UNKNOWN
/// leaves) approximation at resolution 2^depth.
CubicalHomology adaptive_homology(const Formula& f, const Box& box, int depth, RasterMode mode);

}  // namespace sabetti
