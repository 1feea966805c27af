#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabetti/adaptive.hpp"
#include "sabetti/covering.hpp"
#include "sabetti/linalg.hpp"

namespace sabetti {

struct GridComponent {
  /// Kept leaves as boxes of the raster.
  std::vector<Box> boxes;
  /// Midpoint of an INSIDE leaf; absent when the component has none.
  std::optional<Point> witness;
  bool fragile() const { return !witness.has_value(); }
};

struct GridComponents {
  std::vector<GridComponent> components;
  /// Set when every kept leaf is UNKNOWN at the depth limit.
  bool exhausted = false;
};

/// Components of the outer raster (INSIDE and UNKNOWN leaves) of f.
GridComponents grid_components(const Formula& f, const Box& box, int max_depth);

struct ComponentId {
  std::vector<int> tuple;
  int index = 0;
  friend auto operator<=>(const ComponentId&, const ComponentId&) = default;
};

struct Inclusion {
  ComponentId from;
  /// Position in from.tuple of the dropped index.
  int drop = 0;
  ComponentId to;
};

struct IncidenceData {
  int piece_count = 0;
  /// Component count of every nonempty intersection of 1 to 3 pieces.
  std::map<std::vector<int>, int> components;
  /// One representative lattice cell (lo, hi) per component, for reports.
  std::map<ComponentId, std::pair<Lattice, Lattice>> samples;
  std::vector<Inclusion> inclusion;
  std::vector<std::string> warnings;

  /// Components of tuples of the given size, in (tuple, index) order.
  std::vector<ComponentId> ids(std::size_t tuple_size) const;
};

/// Intersections computed as subcomplexes of one cell complex on a shared
/// raster: a component of an intersection is mapped to the component of a
/// coarser intersection that contains its vertices.
IncidenceData build_incidence(const Cover& cover, int max_depth);
IncidenceData build_incidence(const PieceRaster& pieces);

struct DeltaMatrices {
  IntSparse d1;
  IntSparse d2;
  int singles = 0;
  int pairs = 0;
  int triples = 0;
};

/// Rows are components of pairs, columns components of singles. Row (i, j):
/// +1 at the component of A_j and -1 at that of A_i.
RatMatrix delta1(const IncidenceData& inc);
/// Rows are components of triples, columns components of pairs. Row (i, j, l):
/// +1 at A_jl, -1 at A_il, +1 at A_ij.
RatMatrix delta2(const IncidenceData& inc);
DeltaMatrices delta_matrices(const IncidenceData& inc);

struct MvBetti {
  int b0 = 0;
  int b1 = 0;
  int rank_d1 = 0;
  int rank_d2 = 0;
  int singles = 0;
  int pairs = 0;
  int triples = 0;
  /// Whether d2 * d1 vanishes.
  bool complex_ok = true;
  std::vector<std::string> warnings;
};

/// b0 = #singles - rank d1, b1 = (#pairs - rank d2) - rank d1.
MvBetti betti_from_cover(const IncidenceData& inc);
/// Same, with the certificates of the cover checked for acyclicity claims.
MvBetti betti_from_cover(const IncidenceData& inc, const Cover& cover);

bool complex_property_holds(const DeltaMatrices& d);

nlohmann::json incidence_to_json(const IncidenceData& inc);
nlohmann::json betti_to_json(const MvBetti& b);

}  // namespace sabetti
