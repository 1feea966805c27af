#include "sabetti/cubical.hpp"

#include <algorithm>
#include <ostream>

#include "sabetti/adaptive.hpp"
#include "sabetti/error.hpp"
#include "sabetti/linalg.hpp"

namespace sabetti {

Grid::Grid(Box box, int resolution) : box_(std::move(box)), res_(resolution) {
  if (box_.empty() || box_.size() > 3) {
    throw Error(ErrorKind::DimensionUnsupported, "grids are limited to dimensions 1 to 3");
  }
  if (res_ < 1) throw Error(ErrorKind::InvalidArgument, "grid resolution must be positive");
  cells_ = 1;
  for (std::size_t a = 0; a < box_.size(); ++a) {
    cells_ *= res_;
    const Rational step = box_[a].width() / Rational(res_);
    std::vector<Rational> l;
    l.reserve(static_cast<std::size_t>(res_) + 1);
    for (int i = 0; i <= res_; ++i) l.push_back(box_[a].lo() + step * Rational(i));
    lines_.push_back(std::move(l));
  }
}

std::array<int, 3> Grid::coords(std::int64_t cell) const {
  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < dimension(); ++a) {
    c[static_cast<std::size_t>(a)] = static_cast<int>(cell % res_);
    cell /= res_;
  }
  return c;
}

std::int64_t Grid::index(const std::array<int, 3>& c) const {
  std::int64_t idx = 0;
  for (int a = dimension() - 1; a >= 0; --a) idx = idx * res_ + c[static_cast<std::size_t>(a)];
  return idx;
}

Box Grid::cell_box(std::int64_t cell) const {
  const auto c = coords(cell);
  std::array<int, 3> hi{c[0] + 1, c[1] + 1, c[2] + 1};
  return region_box(c, hi);
}

Box Grid::region_box(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const {
  Box b;
  b.reserve(box_.size());
  for (int a = 0; a < dimension(); ++a) {
    const auto u = static_cast<std::size_t>(a);
    b.emplace_back(line(a, lo[u]), line(a, hi[u]));
  }
  return b;
}

Point Grid::cell_center(std::int64_t cell) const { return box_midpoint(cell_box(cell)); }

namespace {

struct Labeler {
  const BoxClassifier& cls;
  bool centered;
  const Grid& grid;
  std::vector<BoxLabel>& labels;

  void fill(const std::array<int, 3>& lo, const std::array<int, 3>& hi, BoxLabel l) {
    const int k = grid.dimension();
    std::array<int, 3> c = lo;
    for (int a = k; a < 3; ++a) c[static_cast<std::size_t>(a)] = 0;
    const int z1 = k > 2 ? hi[2] : 1, y1 = k > 1 ? hi[1] : 1;
    for (c[2] = k > 2 ? lo[2] : 0; c[2] < z1; ++c[2]) {
      for (c[1] = k > 1 ? lo[1] : 0; c[1] < y1; ++c[1]) {
        for (c[0] = lo[0]; c[0] < hi[0]; ++c[0]) labels[static_cast<std::size_t>(grid.index(c))] = l;
      }
    }
  }

  void run(const std::array<int, 3>& lo, const std::array<int, 3>& hi, std::vector<BoxLabel> state) {
    const int k = grid.dimension();
    const BoxLabel l = centered ? cls.classify_cells({lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}, state)
                                : cls.classify(grid.region_box(lo, hi), state);
    bool unit = true;
    for (int a = 0; a < k; ++a) unit = unit && hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)] == 1;
    if (l != BoxLabel::UNKNOWN || unit) {
      fill(lo, hi, l);
      return;
    }
    // Split every axis longer than one cell; up to 2^k children.
    std::array<std::array<int, 3>, 3> cut{};
    std::array<int, 3> parts{1, 1, 1};
    for (int a = 0; a < k; ++a) {
      const auto u = static_cast<std::size_t>(a);
      cut[u] = {lo[u], (lo[u] + hi[u]) / 2, hi[u]};
      parts[u] = hi[u] - lo[u] > 1 ? 2 : 1;
      if (parts[u] == 1) cut[u][1] = hi[u];
    }
    for (int i = 0; i < parts[0]; ++i) {
      for (int j = 0; j < parts[1]; ++j) {
        for (int m = 0; m < parts[2]; ++m) {
          const std::array<int, 3> idx{i, j, m};
          std::array<int, 3> clo{}, chi{};
          for (int a = 0; a < k; ++a) {
            const auto u = static_cast<std::size_t>(a);
            clo[u] = cut[u][static_cast<std::size_t>(idx[u])];
            chi[u] = cut[u][static_cast<std::size_t>(idx[u]) + 1];
          }
          run(clo, chi, state);
        }
      }
    }
  }
};

}  // namespace

std::vector<BoxLabel> label_cells(const Formula& f, const Grid& grid, Enclosure enclosure) {
  if (f.variable_count() != grid.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "formula and grid dimensions differ");
  }
  BoxClassifier cls(f, enclosure);
  const bool centered = enclosure == Enclosure::Centered;
  if (centered) cls.bind_grid(grid.box(), grid.resolution());
  std::vector<BoxLabel> labels(static_cast<std::size_t>(grid.cell_count()), BoxLabel::UNKNOWN);
  Labeler lab{cls, centered, grid, labels};
  const std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{1, 1, 1};
  for (int a = 0; a < grid.dimension(); ++a) hi[static_cast<std::size_t>(a)] = grid.resolution();
  lab.run(lo, hi, std::vector<BoxLabel>(cls.atom_count(), BoxLabel::UNKNOWN));
  return labels;
}

CubicalComplex complex_from_labels(const Grid& grid, const std::vector<BoxLabel>& labels, RasterMode mode) {
  CubicalComplex c{grid, {}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == BoxLabel::INSIDE || (mode == RasterMode::OUTER && labels[i] == BoxLabel::UNKNOWN)) {
      c.cubes.push_back(static_cast<std::int64_t>(i));
    }
  }
  return c;
}

CubicalComplex rasterize(const Formula& f, const Box& box, int resolution, RasterMode mode) {
  if (f.variable_count() > 3) throw Error(ErrorKind::DimensionUnsupported, "rasterization supports k <= 3");
  const Grid grid(box, resolution);
  return complex_from_labels(grid, label_cells(f, grid), mode);
}

namespace {

// Cells of the complex are encoded as anchor * 2^k + mask, where the anchor is
// a vertex of the (res+1)^k lattice and the mask lists the axes the cell spans.
struct CellTable {
  int k;
  std::int64_t stride[3];
  std::array<std::vector<std::int64_t>, 4> by_dim;
};

CellTable enumerate_cells(const CubicalComplex& c) {
  const int k = c.dimension();
  const std::int64_t n = c.grid.resolution() + 1;
  CellTable t{k, {1, n, n * n}, {}};
  std::vector<std::int64_t> all;
  all.reserve(c.cubes.size() * (k == 3 ? 27 : (k == 2 ? 9 : 3)));
  const int full = (1 << k) - 1;
  for (std::int64_t cube : c.cubes) {
    const auto co = c.grid.coords(cube);
    std::int64_t anchor = 0;
    for (int a = 0; a < k; ++a) anchor += co[static_cast<std::size_t>(a)] * t.stride[a];
    for (int mask = 0; mask <= full; ++mask) {
      const int free = full & ~mask;
      // Enumerate offsets on axes not spanned by the cell.
      for (int off = free;; off = (off - 1) & free) {
        std::int64_t v = anchor;
        for (int a = 0; a < k; ++a) {
          if (off & (1 << a)) v += t.stride[a];
        }
        all.push_back(v * (1LL << k) + mask);
        if (off == 0) break;
      }
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (std::int64_t code : all) {
    const int mask = static_cast<int>(code & full);
    t.by_dim[static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)))].push_back(code);
  }
  return t;
}

IntSparse boundary_matrix(const CellTable& t, int d) {
  const auto& cols = t.by_dim[static_cast<std::size_t>(d)];
  const auto& rows = t.by_dim[static_cast<std::size_t>(d - 1)];
  IntSparse m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  m.reserve(Eigen::VectorXi::Constant(static_cast<int>(cols.size()), 2 * d));
  const int k = t.k;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const std::int64_t code = cols[j];
    const int mask = static_cast<int>(code & ((1LL << k) - 1));
    const std::int64_t anchor = code >> k;
    int pos = 0;
    for (int a = 0; a < k; ++a) {
      if (!(mask & (1 << a))) continue;
      const int sub = mask & ~(1 << a);
      const std::int64_t sign = pos % 2 == 0 ? 1 : -1;
      for (int side = 0; side < 2; ++side) {
        const std::int64_t face = (anchor + side * t.stride[a]) * (1LL << k) + sub;
        const auto it = std::lower_bound(rows.begin(), rows.end(), face);
        m.insert(static_cast<int>(it - rows.begin()), static_cast<int>(j)) = side == 0 ? -sign : sign;
      }
      ++pos;
    }
  }
  m.makeCompressed();
  return m;
}

}  // namespace

CubicalHomology cubical_homology(const CubicalComplex& c) {
  CubicalHomology h;
  if (c.cubes.empty()) return h;
  const CellTable t = enumerate_cells(c);
  const int k = t.k;
  for (int d = 0; d <= k; ++d) h.cells[static_cast<std::size_t>(d)] = static_cast<std::int64_t>(t.by_dim[static_cast<std::size_t>(d)].size());
  // Top-down with clearing: a d-cell that is the pivot of a reduced boundary
  // column in dimension d+1 has a boundary that reduces to zero.
  std::vector<bool> cleared;
  for (int d = k; d >= 1; --d) {
    const IntSparse m = boundary_matrix(t, d);
    const ColumnReduction r = reduce_columns(m, cleared);
    h.ranks[static_cast<std::size_t>(d)] = r.rank;
    cleared.assign(static_cast<std::size_t>(m.rows()), false);
    for (int p : r.pivot_row) {
      if (p >= 0) cleared[static_cast<std::size_t>(p)] = true;
    }
  }
  auto betti = [&](int i) -> int {
    if (i > k) return 0;
    const std::int64_t next = i + 1 <= k ? h.ranks[static_cast<std::size_t>(i + 1)] : 0;
    return static_cast<int>(h.cells[static_cast<std::size_t>(i)] - h.ranks[static_cast<std::size_t>(i)] - next);
  };
  h.betti = BettiNumbers{betti(0), betti(1), betti(2)};
  return h;
}

StableBetti stable_betti(const Formula& f, const Box& box, int max_resolution) {
  if (f.variable_count() > 3) throw Error(ErrorKind::DimensionUnsupported, "the oracle supports k <= 3");
  const bool closed = is_p_closed(f);
  StableBetti out;
  // Resolutions are powers of two so the adaptive raster reproduces the
  // uniform grid exactly.
  for (int depth = 3; (1 << depth) <= max_resolution; ++depth) {
    const DyadicRaster raster({f}, box, depth);
    std::vector<bool> inner(raster.leaves().size()), outer(raster.leaves().size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
      inner[i] = raster.label(i, 0) == BoxLabel::INSIDE;
      outer[i] = raster.label(i, 0) != BoxLabel::OUTSIDE;
    }
    OracleReading reading{1 << depth, LeafComplex(raster, inner).homology().betti,
                          LeafComplex(raster, outer).homology().betti};
    out.readings.push_back(reading);
    const std::size_t n = out.readings.size();
    if (n < 2) continue;
    const OracleReading& a = out.readings[n - 2];
    const OracleReading& b = out.readings[n - 1];
    // An empty inner reading next to a nonempty outer one has not resolved the set yet.
    auto resolved = [](const OracleReading& x) { return !(x.inner == BettiNumbers{} && !(x.outer == BettiNumbers{})); };
    const bool agree = closed ? (a.inner == a.outer && b.inner == b.outer && a.inner == b.inner)
                              : (resolved(a) && resolved(b) && a.inner == b.inner);
    if (agree) {
      out.b0 = a.inner.b0;
      out.b1 = a.inner.b1;
      out.converged = true;
      out.resolution = a.resolution;
      return out;
    }
  }
  if (!out.readings.empty()) {
    out.b0 = out.readings.back().inner.b0;
    out.b1 = out.readings.back().inner.b1;
    out.resolution = out.readings.back().resolution;
  }
  return out;
}

void write_complex(std::ostream& os, const CubicalComplex& c) {
  const int k = c.dimension();
  os << k << ' ' << c.grid.resolution() << ' ';
  for (int a = 0; a < k; ++a) os << (a ? "," : "") << c.grid.box()[static_cast<std::size_t>(a)].lo();
  os << ' ';
  for (int a = 0; a < k; ++a) {
    os << (a ? "," : "") << c.grid.box()[static_cast<std::size_t>(a)].width() / Rational(c.grid.resolution());
  }
  os << '\n';
  for (std::int64_t cube : c.cubes) {
    const auto co = c.grid.coords(cube);
    for (int a = 0; a < k; ++a) os << (a ? " " : "") << co[static_cast<std::size_t>(a)];
    os << '\n';
  }
}

}  // namespace sabetti
