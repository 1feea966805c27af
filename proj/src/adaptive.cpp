#include "sabetti/adaptive.hpp"

#include <algorithm>
#include <numeric>

#include "sabetti/error.hpp"
#include "sabetti/linalg.hpp"

namespace sabetti {

namespace {
constexpr int kMaxDepth = 19;
}

DyadicRaster::DyadicRaster(std::vector<Formula> formulas, Box root, int max_depth, int min_depth,
                           Enclosure enclosure, std::vector<std::pair<Lattice, Lattice>> cuts)
    : k_(static_cast<int>(root.size())),
      depth_(max_depth),
      min_depth_(std::min(min_depth, max_depth)),
      root_(std::move(root)),
      formulas_(std::move(formulas)),
      cuts_(std::move(cuts)) {
  if (k_ < 1 || k_ > 3) throw Error(ErrorKind::DimensionUnsupported, "rasters are limited to dimensions 1 to 3");
  if (depth_ < 0 || depth_ > kMaxDepth) throw Error(ErrorKind::InvalidArgument, "raster depth must lie in 0..19");
  for (const Formula& f : formulas_) {
    if (f.variable_count() != k_) throw Error(ErrorKind::DimensionMismatch, "formula and box dimensions differ");
    classifiers_.emplace_back(f, enclosure);
    if (enclosure == Enclosure::Centered) classifiers_.back().bind_grid(root_, std::int64_t{1} << depth_);
  }
  centered_ = enclosure == Enclosure::Centered;
  const Rational cells{mpz_class(mpz_class(1) << depth_)};
  for (const Interval& iv : root_) step_.push_back(iv.width() / cells);
  std::vector<std::vector<BoxLabel>> states;
  for (const BoxClassifier& c : classifiers_) states.emplace_back(c.atom_count(), BoxLabel::UNKNOWN);
  build(0, Lattice{0, 0, 0}, std::vector<BoxLabel>(formulas_.size(), BoxLabel::UNKNOWN), std::move(states));
}

std::uint64_t DyadicRaster::key(int level, const Lattice& c) {
  return (static_cast<std::uint64_t>(level) << 57) | (static_cast<std::uint64_t>(c[2]) << 38) |
         (static_cast<std::uint64_t>(c[1]) << 19) | static_cast<std::uint64_t>(c[0]);
}

Rational DyadicRaster::coordinate(int axis, std::int64_t i) const {
  const auto a = static_cast<std::size_t>(axis);
  return root_[a].lo() + step_[a] * Rational(mpz_class(static_cast<long>(i)));
}

Box DyadicRaster::box(const Lattice& lo, const Lattice& hi) const {
  Box b;
  b.reserve(static_cast<std::size_t>(k_));
  for (int a = 0; a < k_; ++a) {
    const auto u = static_cast<std::size_t>(a);
    b.emplace_back(coordinate(a, lo[u]), coordinate(a, hi[u]));
  }
  return b;
}

Box DyadicRaster::leaf_box(std::size_t leaf) const {
  const Leaf& l = leaves_[leaf];
  Lattice hi = l.lo;
  for (int a = 0; a < k_; ++a) hi[static_cast<std::size_t>(a)] += l.size;
  return box(l.lo, hi);
}

std::optional<int> DyadicRaster::node(int level, const Lattice& coords) const {
  const auto it = nodes_.find(key(level, coords));
  if (it == nodes_.end()) return std::nullopt;
  return it->second;
}

std::pair<int, int> DyadicRaster::leaf_range(int level, const Lattice& coords) const {
  auto descend = [&](int bit) {
    int l = level;
    Lattice c = coords;
    for (;;) {
      const auto r = node(l, c);
      if (!r) throw Error(ErrorKind::InvalidArgument, "no such raster node");
      if (*r >= 0) return *r;
      for (int a = 0; a < k_; ++a) c[static_cast<std::size_t>(a)] = 2 * c[static_cast<std::size_t>(a)] + bit;
      ++l;
    }
  };
  return {descend(0), descend(1) + 1};
}

std::optional<std::pair<Lattice, Lattice>> DyadicRaster::lattice_box(const Box& b) const {
  if (static_cast<int>(b.size()) != k_) return std::nullopt;
  std::pair<Lattice, Lattice> out{{0, 0, 0}, {0, 0, 0}};
  const std::int64_t cells = std::int64_t{1} << depth_;
  for (int a = 0; a < k_; ++a) {
    const auto u = static_cast<std::size_t>(a);
    const Rational lo = (b[u].lo() - root_[u].lo()) / step_[u];
    const Rational hi = (b[u].hi() - root_[u].lo()) / step_[u];
    if (!lo.is_integer() || !hi.is_integer()) return std::nullopt;
    out.first[u] = std::clamp<std::int64_t>(lo.num().get_si(), 0, cells);
    out.second[u] = std::clamp<std::int64_t>(hi.num().get_si(), 0, cells);
    if (lo < Rational(0) || hi > Rational(mpz_class(static_cast<long>(cells)))) return std::nullopt;
  }
  return out;
}

bool DyadicRaster::leaf_inside(std::size_t leaf, const Lattice& lo, const Lattice& hi) const {
  const Leaf& l = leaves_[leaf];
  for (int a = 0; a < k_; ++a) {
    const auto u = static_cast<std::size_t>(a);
    if (l.lo[u] < lo[u] || l.lo[u] + l.size > hi[u]) return false;
  }
  return true;
}

void DyadicRaster::build(int level, const Lattice& coords, std::vector<BoxLabel> decided,
                         std::vector<std::vector<BoxLabel>> states) {
  const std::int64_t size = std::int64_t{1} << (depth_ - level);
  Lattice lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < k_; ++a) {
    const auto u = static_cast<std::size_t>(a);
    lo[u] = coords[u] * size;
    hi[u] = lo[u] + size;
  }
  bool unknown = false;
  const Box b = centered_ ? Box{} : box(lo, hi);
  for (std::size_t f = 0; f < formulas_.size(); ++f) {
    if (decided[f] == BoxLabel::UNKNOWN) {
      decided[f] = centered_ ? classifiers_[f].classify_cells(lo, hi, states[f]) : classifiers_[f].classify(b, states[f]);
    }
    unknown = unknown || decided[f] == BoxLabel::UNKNOWN;
  }
  auto straddles = [&](const std::pair<Lattice, Lattice>& cut) {
    bool meets = true, inside = true;
    for (int a = 0; a < k_; ++a) {
      const auto u = static_cast<std::size_t>(a);
      meets = meets && lo[u] < cut.second[u] && hi[u] > cut.first[u];
      inside = inside && lo[u] >= cut.first[u] && hi[u] <= cut.second[u];
    }
    return meets && !inside;
  };
  const bool cut = std::any_of(cuts_.begin(), cuts_.end(), straddles);
  if (level >= depth_ || (level >= min_depth_ && !unknown && !cut)) {
    nodes_.emplace(key(level, coords), static_cast<int>(leaves_.size()));
    leaves_.push_back(Leaf{level, lo, size});
    labels_.insert(labels_.end(), decided.begin(), decided.end());
    return;
  }
  nodes_.emplace(key(level, coords), -1);
  for (int child = 0; child < (1 << k_); ++child) {
    Lattice c{0, 0, 0};
    for (int a = 0; a < k_; ++a) {
      const auto u = static_cast<std::size_t>(a);
      c[u] = 2 * coords[u] + ((child >> a) & 1);
    }
    build(level + 1, c, decided, states);
  }
}

unsigned __int128 LeafComplex::key(const Lattice& lo, const Lattice& hi) {
  unsigned __int128 x = 0;
  for (std::size_t a = 0; a < 3; ++a) x = (x << 20) | static_cast<unsigned __int128>(lo[a]);
  for (std::size_t a = 0; a < 3; ++a) x = (x << 20) | static_cast<unsigned __int128>(hi[a]);
  return x;
}

LeafComplex::LeafComplex(const DyadicRaster& raster, const std::vector<bool>& selected) : k_(raster.dimension()) {
  const auto& leaves = raster.leaves();
  if (selected.size() != leaves.size()) throw Error(ErrorKind::InvalidArgument, "selection size differs from leaf count");
  const int depth = raster.max_depth();
  int faces = 1;
  for (int a = 0; a < k_; ++a) faces *= 3;

  // Leaf holding the node position, walking up while the node is implied by a
  // coarser leaf; -1 if the position is subdivided.
  auto locate = [&](int level, Lattice pos) -> int {
    for (;;) {
      if (const auto r = raster.node(level, pos)) return *r;
      --level;
      for (auto& p : pos) p >>= 1;
    }
  };
  // Leaf touching vertex v inside the (possibly subdivided) node position.
  auto locate_vertex = [&](int level, Lattice pos, const Lattice& v) -> int {
    int id = locate(level, pos);
    while (id < 0) {
      const std::int64_t child = std::int64_t{1} << (depth - level - 1);
      for (int a = 0; a < k_; ++a) {
        const auto u = static_cast<std::size_t>(a);
        pos[u] = 2 * pos[u] + (v[u] == pos[u] * 2 * child ? 0 : 1);
      }
      ++level;
      id = locate(level, pos);
    }
    return id;
  };

  std::vector<Cell> found;
  std::unordered_map<unsigned __int128, int, KeyHash> seen;
  for (std::size_t id = 0; id < leaves.size(); ++id) {
    const auto& leaf = leaves[id];
    const std::int64_t extent = std::int64_t{1} << leaf.level;
    Lattice node{0, 0, 0};
    for (int a = 0; a < k_; ++a) node[static_cast<std::size_t>(a)] = leaf.lo[static_cast<std::size_t>(a)] / leaf.size;
    for (int code = 0; code < faces; ++code) {
      // Per axis: 0 = lower side, 1 = upper side, 2 = spanned.
      std::array<int, 3> t{2, 2, 2};
      Cell cell{leaf.lo, leaf.lo, 0, {}};
      std::vector<int> fixed;
      for (int a = 0, c = code; a < k_; ++a, c /= 3) {
        const auto u = static_cast<std::size_t>(a);
        t[u] = c % 3;
        if (t[u] == 1) cell.lo[u] += leaf.size;
        cell.hi[u] = cell.lo[u] + (t[u] == 2 ? leaf.size : 0);
        if (t[u] == 2) ++cell.dim;
        else fixed.push_back(a);
      }
      const auto ck = key(cell.lo, cell.hi);
      if (seen.count(ck)) continue;
      bool stratum = true;
      for (int sub = 0; sub < (1 << fixed.size()) && stratum; ++sub) {
        Lattice pos = node;
        bool inside = true;
        for (std::size_t i = 0; i < fixed.size(); ++i) {
          if (!(sub & (1 << i))) continue;
          const auto u = static_cast<std::size_t>(fixed[i]);
          pos[u] += t[u] == 1 ? 1 : -1;
          inside = inside && pos[u] >= 0 && pos[u] < extent;
        }
        if (!inside) continue;
        int owner = static_cast<int>(id);
        if (sub != 0) {
          owner = cell.dim == 0 ? locate_vertex(leaf.level, pos, cell.lo) : locate(leaf.level, pos);
          if (owner < 0) stratum = false;
        }
        if (stratum && selected[static_cast<std::size_t>(owner)] &&
            std::find(cell.leaves.begin(), cell.leaves.end(), owner) == cell.leaves.end()) {
          cell.leaves.push_back(owner);
        }
      }
      if (!stratum) continue;
      seen.emplace(ck, static_cast<int>(found.size()));
      if (cell.leaves.empty()) continue;
      std::sort(cell.leaves.begin(), cell.leaves.end());
      found.push_back(std::move(cell));
    }
  }
  // Order: by dimension, then by the upper corner with the last axis slowest,
  // which keeps reduced boundary columns short.
  std::sort(found.begin(), found.end(), [](const Cell& x, const Cell& y) {
    if (x.dim != y.dim) return x.dim < y.dim;
    for (int a = 2; a >= 0; --a) {
      const auto u = static_cast<std::size_t>(a);
      if (x.hi[u] != y.hi[u]) return x.hi[u] < y.hi[u];
    }
    for (int a = 2; a >= 0; --a) {
      const auto u = static_cast<std::size_t>(a);
      if (x.lo[u] != y.lo[u]) return x.lo[u] < y.lo[u];
    }
    return false;
  });
  cells_ = std::move(found);
  index_.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) index_.emplace(key(cells_[i].lo, cells_[i].hi), static_cast<int>(i));
  leaf_cells_.resize(leaves.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    for (int l : cells_[i].leaves) leaf_cells_[static_cast<std::size_t>(l)].push_back(static_cast<int>(i));
  }
  boundary_.resize(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    int pos = 0;
    for (int a = 0; a < k_; ++a) {
      const auto u = static_cast<std::size_t>(a);
      if (c.hi[u] == c.lo[u]) continue;
      const int sign = pos % 2 == 0 ? 1 : -1;
      Lattice flo = c.lo, fhi = c.hi;
      fhi[u] = c.lo[u];
      collect_faces(flo, fhi, -sign, boundary_[i]);
      flo[u] = c.hi[u];
      fhi[u] = c.hi[u];
      collect_faces(flo, fhi, sign, boundary_[i]);
      ++pos;
    }
  }
}

int LeafComplex::find_cell(const Lattice& lo, const Lattice& hi) const {
  const auto it = index_.find(key(lo, hi));
  return it == index_.end() ? -1 : it->second;
}

void LeafComplex::collect_faces(const Lattice& lo, const Lattice& hi, int sign,
                                std::vector<std::pair<int, int>>& out) const {
  const int id = find_cell(lo, hi);
  if (id >= 0) {
    out.emplace_back(id, sign);
    return;
  }
  std::vector<int> spanned;
  for (int a = 0; a < k_; ++a) {
    if (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)] > 1) spanned.push_back(a);
    else if (hi[static_cast<std::size_t>(a)] != lo[static_cast<std::size_t>(a)]) {
      throw Error(ErrorKind::InvalidArgument, "leaf complex is not closed under faces");
    }
  }
  if (spanned.empty()) throw Error(ErrorKind::InvalidArgument, "leaf complex is not closed under faces");
  for (int part = 0; part < (1 << spanned.size()); ++part) {
    Lattice plo = lo, phi = hi;
    for (std::size_t i = 0; i < spanned.size(); ++i) {
      const auto u = static_cast<std::size_t>(spanned[i]);
      const std::int64_t mid = (lo[u] + hi[u]) / 2;
      if (part & (1 << i)) plo[u] = mid;
      else phi[u] = mid;
    }
    collect_faces(plo, phi, sign, out);
  }
}

std::vector<int> LeafComplex::cells_of_leaves(const std::vector<int>& leaves) const {
  std::vector<int> out;
  for (int l : leaves) {
    const auto& c = leaf_cells_[static_cast<std::size_t>(l)];
    out.insert(out.end(), c.begin(), c.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CubicalHomology LeafComplex::homology() const {
  std::vector<int> all(cells_.size());
  std::iota(all.begin(), all.end(), 0);
  return homology(all);
}

CubicalHomology LeafComplex::homology(const std::vector<int>& ids) const {
  CubicalHomology h;
  std::array<std::vector<int>, 4> by_dim;
  std::vector<int> row(cells_.size(), -1);
  for (int i : ids) {
    auto& v = by_dim[static_cast<std::size_t>(cells_[static_cast<std::size_t>(i)].dim)];
    row[static_cast<std::size_t>(i)] = static_cast<int>(v.size());
    v.push_back(i);
  }
  for (std::size_t d = 0; d < 4; ++d) h.cells[d] = static_cast<std::int64_t>(by_dim[d].size());
  std::vector<bool> cleared;
  for (int d = k_; d >= 1; --d) {
    const auto& cols = by_dim[static_cast<std::size_t>(d)];
    IntSparse m(static_cast<int>(by_dim[static_cast<std::size_t>(d - 1)].size()), static_cast<int>(cols.size()));
    std::vector<Eigen::Triplet<std::int64_t, int>> entries;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (const auto& [face, sign] : boundary_[static_cast<std::size_t>(cols[j])]) {
        const int r = row[static_cast<std::size_t>(face)];
        if (r < 0) throw Error(ErrorKind::InvalidArgument, "cell list is not closed under faces");
        entries.emplace_back(r, static_cast<int>(j), sign);
      }
    }
    m.setFromTriplets(entries.begin(), entries.end());
    const ColumnReduction r = reduce_columns(m, cleared);
    h.ranks[static_cast<std::size_t>(d)] = r.rank;
    cleared.assign(static_cast<std::size_t>(m.rows()), false);
    for (int p : r.pivot_row) {
      if (p >= 0) cleared[static_cast<std::size_t>(p)] = true;
    }
  }
  auto betti = [&](int i) -> int {
    if (i > k_) return 0;
    const std::int64_t next = i + 1 <= k_ ? h.ranks[static_cast<std::size_t>(i + 1)] : 0;
    return static_cast<int>(h.cells[static_cast<std::size_t>(i)] - h.ranks[static_cast<std::size_t>(i)] - next);
  };
  h.betti = BettiNumbers{betti(0), betti(1), betti(2)};
  return h;
}

int LeafComplex::Components::label_of(int vertex) const {
  const auto it = std::lower_bound(vertex_label.begin(), vertex_label.end(), std::make_pair(vertex, -1));
  if (it == vertex_label.end() || it->first != vertex) return -1;
  return it->second;
}

LeafComplex::Components LeafComplex::components(const std::vector<int>& ids) const {
  std::vector<int> verts;
  for (int i : ids) {
    if (cells_[static_cast<std::size_t>(i)].dim == 0) verts.push_back(i);
  }
  std::sort(verts.begin(), verts.end());
  std::vector<int> parent(verts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto local = [&](int v) {
    const auto it = std::lower_bound(verts.begin(), verts.end(), v);
    if (it == verts.end() || *it != v) throw Error(ErrorKind::InvalidArgument, "cell list is not closed under faces");
    return static_cast<int>(it - verts.begin());
  };
  for (int i : ids) {
    if (cells_[static_cast<std::size_t>(i)].dim != 1) continue;
    const auto& b = boundary_[static_cast<std::size_t>(i)];
    const int x = find(local(b.front().first)), y = find(local(b.back().first));
    if (x != y) parent[static_cast<std::size_t>(std::max(x, y))] = std::min(x, y);
  }
  Components out;
  std::vector<int> root_label(verts.size(), -1);
  out.vertex_label.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const auto r = static_cast<std::size_t>(find(static_cast<int>(i)));
    if (root_label[r] < 0) root_label[r] = out.count++;
    out.vertex_label.emplace_back(verts[i], root_label[r]);
  }
  return out;
}

CubicalHomology adaptive_homology(const Formula& f, const Box& box, int depth, RasterMode mode) {
  const DyadicRaster raster({f}, box, depth);
  std::vector<bool> keep(raster.leaves().size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const BoxLabel l = raster.label(i, 0);
    keep[i] = l == BoxLabel::INSIDE || (mode == RasterMode::OUTER && l == BoxLabel::UNKNOWN);
  }
  return LeafComplex(raster, keep).homology();
}

}  // namespace sabetti
