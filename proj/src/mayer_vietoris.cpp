#include "sabetti/mayer_vietoris.hpp"

#include <algorithm>

#include "sabetti/error.hpp"

namespace sabetti {

namespace {

using Tuple = std::vector<int>;

std::string tuple_key(const Tuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s;
}

nlohmann::json id_json(const ComponentId& c) { return {c.tuple, c.index}; }

std::vector<Tuple> sub_tuples(const std::vector<int>& set, std::size_t size) {
  std::vector<Tuple> out;
  const std::size_t m = set.size();
  if (size == 2) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) out.push_back({set[a], set[b]});
  } else if (size == 3) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        for (std::size_t c = b + 1; c < m; ++c) out.push_back({set[a], set[b], set[c]});
  }
  return out;
}

// Column index of every component id of a tuple size.
std::map<ComponentId, int> column_index(const IncidenceData& inc, std::size_t size) {
  std::map<ComponentId, int> out;
  int n = 0;
  for (const ComponentId& c : inc.ids(size)) out.emplace(c, n++);
  return out;
}

std::map<std::pair<ComponentId, int>, ComponentId> inclusion_map(const IncidenceData& inc) {
  std::map<std::pair<ComponentId, int>, ComponentId> out;
  for (const Inclusion& e : inc.inclusion) out.emplace(std::make_pair(e.from, e.drop), e.to);
  return out;
}

using Triplet = Eigen::Triplet<std::int64_t>;

// Row r of the coboundary on tuples of the given size: sign (-1)^p at the
// component obtained by dropping position p.
IntSparse coboundary(const IncidenceData& inc, std::size_t size) {
  const auto rows = column_index(inc, size);
  const auto cols = column_index(inc, size - 1);
  const auto incl = inclusion_map(inc);
  std::vector<Triplet> entries;
  for (const auto& [id, r] : rows) {
    for (int p = 0; p < static_cast<int>(size); ++p) {
      const auto it = incl.find({id, p});
      if (it == incl.end()) {
        throw Error(ErrorKind::IncompleteIncidence, "no inclusion for component " + tuple_key(id.tuple) + "#" +
                                                        std::to_string(id.index) + " dropping position " + std::to_string(p));
      }
      const auto col = cols.find(it->second);
      if (col == cols.end()) throw Error(ErrorKind::IncompleteIncidence, "inclusion into an unknown component");
      entries.emplace_back(r, col->second, p % 2 == 0 ? 1 : -1);
    }
  }
  IntSparse m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

}  // namespace

std::vector<ComponentId> IncidenceData::ids(std::size_t tuple_size) const {
  std::vector<ComponentId> out;
  for (const auto& [t, n] : components) {
    if (t.size() != tuple_size) continue;
    for (int c = 0; c < n; ++c) out.push_back(ComponentId{t, c});
  }
  return out;
}

GridComponents grid_components(const Formula& f, const Box& box, int max_depth) {
  const DyadicRaster raster({f}, box, max_depth);
  std::vector<bool> keep(raster.leaves().size());
  std::vector<int> kept;
  bool any_inside = false;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    keep[i] = raster.label(i, 0) != BoxLabel::OUTSIDE;
    if (keep[i]) kept.push_back(static_cast<int>(i));
    any_inside = any_inside || raster.label(i, 0) == BoxLabel::INSIDE;
  }
  GridComponents out;
  out.exhausted = !kept.empty() && !any_inside;
  if (kept.empty()) return out;
  const LeafComplex complex(raster, keep);
  const auto comps = complex.components(complex.cells_of_leaves(kept));
  out.components.resize(static_cast<std::size_t>(comps.count));
  for (int l : kept) {
    const auto leaf = static_cast<std::size_t>(l);
    GridComponent& c = out.components[static_cast<std::size_t>(comps.label_of(complex.cells_of_leaf(leaf).front()))];
    c.boxes.push_back(raster.leaf_box(leaf));
    if (!c.witness && raster.label(leaf, 0) == BoxLabel::INSIDE) c.witness = box_midpoint(c.boxes.back());
  }
  return out;
}

IncidenceData build_incidence(const Cover& cover, int max_depth) {
  return build_incidence(rasterize_cover(cover, max_depth));
}

IncidenceData build_incidence(const PieceRaster& pieces) {
  const DyadicRaster& raster = *pieces.raster;
  const int n = static_cast<int>(pieces.piece_leaves.size());
  std::vector<bool> selected(raster.leaves().size());
  for (const auto& leaves : pieces.piece_leaves) {
    for (int l : leaves) selected[static_cast<std::size_t>(l)] = true;
  }
  const LeafComplex complex(raster, selected);

  std::map<Tuple, std::vector<int>> cells;
  std::vector<std::vector<int>> owners(complex.cells().size());
  for (int i = 0; i < n; ++i) {
    std::vector<int> own = complex.cells_of_leaves(pieces.piece_leaves[static_cast<std::size_t>(i)]);
    for (int c : own) owners[static_cast<std::size_t>(c)].push_back(i);
    if (!own.empty()) cells.emplace(Tuple{i}, std::move(own));
  }
  // Every nonempty closed intersection contains a vertex, but components are
  // taken over all its cells, so every cell with two or more owners is listed.
  for (std::size_t c = 0; c < owners.size(); ++c) {
    const auto& set = owners[c];
    if (set.size() < 2) continue;
    for (std::size_t size = 2; size <= 3; ++size) {
      for (auto& t : sub_tuples(set, size)) cells[t].push_back(static_cast<int>(c));
    }
  }

  IncidenceData inc;
  inc.piece_count = n;
  std::map<Tuple, LeafComplex::Components> comps;
  for (const auto& [t, list] : cells) {
    auto c = complex.components(list);
    if (c.count == 0) continue;
    inc.components[t] = c.count;
    for (const auto& [v, label] : c.vertex_label) {
      const ComponentId id{t, label};
      if (!inc.samples.count(id)) {
        const auto& cell = complex.cells()[static_cast<std::size_t>(v)];
        inc.samples.emplace(id, std::make_pair(cell.lo, cell.hi));
      }
    }
    comps.emplace(t, std::move(c));
  }
  for (const auto& [t, c] : comps) {
    if (t.size() < 2) continue;
    for (int p = 0; p < static_cast<int>(t.size()); ++p) {
      Tuple parent = t;
      parent.erase(parent.begin() + p);
      const auto& pc = comps.at(parent);
      std::vector<int> target(static_cast<std::size_t>(c.count), -1);
      for (const auto& [v, label] : c.vertex_label) {
        const int to = pc.label_of(v);
        int& slot = target[static_cast<std::size_t>(label)];
        if (slot >= 0 && slot != to) {
          throw Error(ErrorKind::AmbiguousInclusion, "component " + std::to_string(label) + " of {" + tuple_key(t) +
                                                         "} meets two components of {" + tuple_key(parent) + "}");
        }
        slot = to;
      }
      for (int label = 0; label < c.count; ++label) {
        inc.inclusion.push_back(Inclusion{ComponentId{t, label}, p, ComponentId{parent, target[static_cast<std::size_t>(label)]}});
      }
    }
  }
  return inc;
}

DeltaMatrices delta_matrices(const IncidenceData& inc) {
  DeltaMatrices d;
  d.singles = static_cast<int>(inc.ids(1).size());
  d.pairs = static_cast<int>(inc.ids(2).size());
  d.triples = static_cast<int>(inc.ids(3).size());
  d.d1 = coboundary(inc, 2);
  d.d2 = coboundary(inc, 3);
  return d;
}

RatMatrix delta1(const IncidenceData& inc) { return to_rat(coboundary(inc, 2)); }
RatMatrix delta2(const IncidenceData& inc) { return to_rat(coboundary(inc, 3)); }

bool complex_property_holds(const DeltaMatrices& d) {
  if (d.d2.rows() == 0 || d.d1.cols() == 0) return true;
  const IntSparse prod = d.d2 * d.d1;
  for (int k = 0; k < prod.outerSize(); ++k) {
    for (IntSparse::InnerIterator it(prod, k); it; ++it) {
      if (it.value() != 0) return false;
    }
  }
  return true;
}

MvBetti betti_from_cover(const IncidenceData& inc) {
  const DeltaMatrices d = delta_matrices(inc);
  MvBetti out;
  out.singles = d.singles;
  out.pairs = d.pairs;
  out.triples = d.triples;
  out.rank_d1 = sparse_rank(d.d1);
  out.rank_d2 = sparse_rank(d.d2);
  out.complex_ok = complex_property_holds(d);
  out.b0 = d.singles - out.rank_d1;
  out.b1 = d.pairs - out.rank_d2 - out.rank_d1;
  out.warnings = inc.warnings;
  if (!out.complex_ok) throw Error(ErrorKind::NegativeBetti, "d2 * d1 does not vanish");
  if (out.b0 < 0 || out.b1 < 0) {
    throw Error(ErrorKind::NegativeBetti, "b0 = " + std::to_string(out.b0) + ", b1 = " + std::to_string(out.b1));
  }
  return out;
}

MvBetti betti_from_cover(const IncidenceData& inc, const Cover& cover) {
  MvBetti out = betti_from_cover(inc);
  const auto asserted = std::count_if(cover.pieces.begin(), cover.pieces.end(),
                                      [](const CoverSet& p) { return p.certificate == Certificate::USER_ASSERTED; });
  if (asserted > 0) {
    out.warnings.push_back("UncertifiedCover: " + std::to_string(asserted) + " pieces carry asserted contractibility only");
  }
  if (cover.box.size() >= 3) {
    out.warnings.push_back("piece acyclicity is checked on rasters through b2; the semi-algebraic pieces are not certified");
  }
  return out;
}

nlohmann::json incidence_to_json(const IncidenceData& inc) {
  nlohmann::json singles = nlohmann::json::array();
  for (int i = 0; i < inc.piece_count; ++i) {
    const auto it = inc.components.find(Tuple{i});
    singles.push_back(it == inc.components.end() ? 0 : it->second);
  }
  nlohmann::json pairs = nlohmann::json::object(), triples = nlohmann::json::object();
  for (const auto& [t, n] : inc.components) {
    if (t.size() == 2) pairs[tuple_key(t)] = n;
    if (t.size() == 3) triples[tuple_key(t)] = n;
  }
  nlohmann::json incl = nlohmann::json::array();
  for (const Inclusion& e : inc.inclusion) incl.push_back({{"from", id_json(e.from)}, {"drop", e.drop}, {"to", id_json(e.to)}});
  return {{"singles", singles}, {"pairs", pairs}, {"triples", triples}, {"inclusion", incl}};
}

nlohmann::json betti_to_json(const MvBetti& b) {
  return {{"b0", b.b0},
          {"b1", b.b1},
          {"ranks", {{"d1", b.rank_d1}, {"d2", b.rank_d2}}},
          {"counts", {{"singles", b.singles}, {"pairs", b.pairs}, {"triples", b.triples}}},
          {"complex_ok", b.complex_ok},
          {"warnings", b.warnings}};
}

}  // namespace sabetti
