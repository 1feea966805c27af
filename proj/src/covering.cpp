#include "sabetti/covering.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sabetti/error.hpp"

namespace sabetti {

namespace {

Formula shifted(const MultiPoly& p, const Rational& c, Relation rel) {
  return Formula::atom(p + MultiPoly::constant(p.variable_count(), c), rel);
}

int family_arity(const SignCondition& sigma) {
  return sigma.family.empty() ? 0 : sigma.family.front().variable_count();
}

bool kept(BoxLabel l, RasterMode mode) {
  return l == BoxLabel::INSIDE || (mode == RasterMode::OUTER && l == BoxLabel::UNKNOWN);
}

nlohmann::json rational_list(const std::vector<Rational>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const Rational& r : v) out.push_back(r.str());
  return out;
}

nlohmann::json box_to_json(const Box& b) {
  nlohmann::json out = nlohmann::json::array();
  for (const Interval& iv : b) out.push_back({iv.lo().str(), iv.hi().str()});
  return out;
}

Box box_from_json(const nlohmann::json& j) {
  Box b;
  for (const auto& iv : j) b.emplace_back(Rational::parse(iv.at(0).get<std::string>()), Rational::parse(iv.at(1).get<std::string>()));
  return b;
}

Box resolve_box(const Formula& s, const std::optional<Box>& box) {
  if (box) {
    if (static_cast<int>(box->size()) != s.variable_count()) throw Error(ErrorKind::DimensionMismatch, "box dimension differs");
    return *box;
  }
  if (auto b = infer_bounding_box(s)) return *b;
  throw Error(ErrorKind::UnboundedSet, "no bounding box given and none can be inferred");
}

bool is_contractible(const BettiNumbers& b) { return b == BettiNumbers{1, 0, 0}; }

std::string caveat(int k) {
  return k <= 2 ? "raster homology (1,0) of a planar complex: acyclic"
                : "raster homology (1,0,0): acyclic raster; the semi-algebraic piece itself is not certified";
}

// Piece construction on one raster: every candidate region is cut into
// closed lattice boxes whose raster is acyclic.
class PieceBuilder {
 public:
  PieceBuilder(const DyadicRaster& raster, std::size_t formula, RasterMode mode)
      : raster_(raster), formula_(formula) {
    std::vector<bool> sel(raster.leaves().size());
    for (std::size_t i = 0; i < sel.size(); ++i) sel[i] = kept(raster.label(i, formula), mode);
    complex_ = std::make_unique<LeafComplex>(raster, sel);
    selected_ = std::move(sel);
  }

  struct Piece {
    Lattice lo, hi;
    bool convex;
    CubicalHomology homology;
    std::vector<int> leaves;
  };

  // Splits the node into acyclic boxes, or keeps it whole when it already is.
  void split_node(int level, const Lattice& coords, std::vector<Piece>& out) const {
    const auto [first, last] = raster_.leaf_range(level, coords);
    std::vector<int> leaves;
    bool all_inside = true;
    for (int l = first; l < last; ++l) {
      if (selected_[static_cast<std::size_t>(l)]) leaves.push_back(l);
      all_inside = all_inside && raster_.label(static_cast<std::size_t>(l), formula_) == BoxLabel::INSIDE;
    }
    if (leaves.empty()) return;
    const std::int64_t size = std::int64_t{1} << (raster_.max_depth() - level);
    Lattice lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < raster_.dimension(); ++a) {
      const auto u = static_cast<std::size_t>(a);
      lo[u] = coords[u] * size;
      hi[u] = lo[u] + size;
    }
    if (all_inside) {
      CubicalHomology h;
      h.betti = BettiNumbers{1, 0, 0};
      out.push_back(Piece{lo, hi, true, h, std::move(leaves)});
      return;
    }
    const CubicalHomology h = complex_->homology(complex_->cells_of_leaves(leaves));
    if (is_contractible(h.betti) || last - first == 1) {
      out.push_back(Piece{lo, hi, false, h, std::move(leaves)});
      return;
    }
    for (int child = 0; child < (1 << raster_.dimension()); ++child) {
      Lattice c{0, 0, 0};
      for (int a = 0; a < raster_.dimension(); ++a) {
        const auto u = static_cast<std::size_t>(a);
        c[u] = 2 * coords[u] + ((child >> a) & 1);
      }
      split_node(level + 1, c, out);
    }
  }

  // Components of the region, each kept whole when its bounding box holds no
  // other component and its raster is acyclic; otherwise split by blocks.
  void split_components(std::vector<Piece>& out) const {
    std::vector<int> all;
    for (std::size_t i = 0; i < selected_.size(); ++i) {
      if (selected_[i]) all.push_back(static_cast<int>(i));
    }
    if (all.empty()) return;
    const LeafComplex::Components comps = complex_->components(complex_->cells_of_leaves(all));
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(comps.count));
    for (int l : all) {
      const int v = complex_->cells_of_leaf(static_cast<std::size_t>(l)).front();
      groups[static_cast<std::size_t>(comps.label_of(v))].push_back(l);
    }
    const int k = raster_.dimension();
    std::vector<Piece> found;
    for (const auto& g : groups) {
      Lattice lo{0, 0, 0}, hi{0, 0, 0};
      for (int a = 0; a < k; ++a) {
        const auto u = static_cast<std::size_t>(a);
        lo[u] = std::numeric_limits<std::int64_t>::max();
        hi[u] = std::numeric_limits<std::int64_t>::min();
        for (int l : g) {
          const auto& leaf = raster_.leaves()[static_cast<std::size_t>(l)];
          lo[u] = std::min(lo[u], leaf.lo[u]);
          hi[u] = std::max(hi[u], leaf.lo[u] + leaf.size);
        }
      }
      std::size_t in_box = 0;
      for (int l : all) in_box += raster_.leaf_inside(static_cast<std::size_t>(l), lo, hi) ? 1 : 0;
      bool overlaps_other = in_box != g.size();
      if (!overlaps_other) {
        // A leaf of another component may still cross the box without lying in it.
        for (int l : all) {
          const auto& leaf = raster_.leaves()[static_cast<std::size_t>(l)];
          bool meets = true;
          for (int a = 0; a < k; ++a) {
            const auto u = static_cast<std::size_t>(a);
            meets = meets && leaf.lo[u] < hi[u] && leaf.lo[u] + leaf.size > lo[u];
          }
          if (meets && !raster_.leaf_inside(static_cast<std::size_t>(l), lo, hi)) overlaps_other = true;
        }
      }
      const CubicalHomology h = complex_->homology(complex_->cells_of_leaves(g));
      if (overlaps_other || !is_contractible(h.betti)) {
        // Block splitting handles every component at once.
        split_node(0, Lattice{0, 0, 0}, out);
        split_all_ = true;
        return;
      }
      found.push_back(Piece{lo, hi, false, h, g});
    }
    out.insert(out.end(), found.begin(), found.end());
  }

  bool split_everything() const { return split_all_; }

 private:
  const DyadicRaster& raster_;
  std::size_t formula_;
  std::vector<bool> selected_;
  std::unique_ptr<LeafComplex> complex_;
  mutable bool split_all_ = false;
};

std::optional<Point> find_witness(const DyadicRaster& raster, const std::vector<int>& leaves, std::size_t formula,
                                  const Formula& f) {
  for (int l : leaves) {
    if (raster.label(static_cast<std::size_t>(l), formula) == BoxLabel::INSIDE) {
      return box_midpoint(raster.leaf_box(static_cast<std::size_t>(l)));
    }
  }
  int tries = 0;
  for (int l : leaves) {
    if (++tries > 64) break;
    Point p = box_midpoint(raster.leaf_box(static_cast<std::size_t>(l)));
    if (f.holds_at(p)) return p;
  }
  return std::nullopt;
}

void add_pieces(Cover& cover, const DyadicRaster& raster, std::size_t formula, const Formula& region,
                const std::vector<PieceBuilder::Piece>& pieces) {
  const int k = raster.dimension();
  for (const auto& p : pieces) {
    CoverSet s;
    s.region = region;
    s.cell = raster.box(p.lo, p.hi);
    s.formula = conjunction({region, box_formula(*s.cell)}, k);
    s.certificate = p.convex ? Certificate::CONVEX_CELL : Certificate::ORACLE_CHECKED;
    s.oracle = p.homology.betti;
    s.witness = find_witness(raster, p.leaves, formula, s.formula);
    if (!p.convex) s.notes.push_back(caveat(k));
    cover.pieces.push_back(std::move(s));
  }
}

}  // namespace

Formula box_formula(const Box& box) {
  const int k = static_cast<int>(box.size());
  std::vector<Formula> parts;
  for (int a = 0; a < k; ++a) {
    const MultiPoly x = MultiPoly::variable(k, a);
    parts.push_back(shifted(x, -box[static_cast<std::size_t>(a)].lo(), Relation::GE));
    parts.push_back(shifted(x, -box[static_cast<std::size_t>(a)].hi(), Relation::LE));
  }
  return conjunction(std::move(parts), k);
}

Formula sigma_minus(const SignCondition& sigma, const EpsilonSchedule& eps, std::vector<std::string>* notes) {
  const int j = level(sigma);
  if (2 * j > eps.count()) throw Error(ErrorKind::ScheduleTooShort, "sigma_minus needs eps_" + std::to_string(2 * j));
  const Rational e = j == 0 ? Rational(0) : eps.value(2 * j);
  if (j == 0 && notes) notes->push_back("level-0 sign condition: no thickening, signs taken as P >= 0 / P <= 0");
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < sigma.family.size(); ++i) {
    const MultiPoly& p = sigma.family[i];
    const int s = sigma.signs[i];
    if (s == 0) parts.push_back(Formula::atom(p, Relation::EQ));
    else if (s > 0) parts.push_back(shifted(p, -e, Relation::GE));
    else parts.push_back(shifted(p, e, Relation::LE));
  }
  return conjunction(std::move(parts), family_arity(sigma));
}

Formula sigma_minus_plus(const SignCondition& sigma, const EpsilonSchedule& eps, const Formula& s_formula) {
  const int j = level(sigma);
  const int k = s_formula.variable_count();
  if (j == 0) return conjunction({sigma_minus(sigma, eps), s_formula}, k);
  if (2 * j > eps.count()) throw Error(ErrorKind::ScheduleTooShort, "sigma_minus_plus needs eps_" + std::to_string(2 * j));
  const Rational zero_width = eps.value(2 * j - 1);
  const Rational sign_width = eps.value(2 * j);
  std::vector<Formula> parts{s_formula};
  for (std::size_t i = 0; i < sigma.family.size(); ++i) {
    const MultiPoly& p = sigma.family[i];
    const int s = sigma.signs[i];
    if (s == 0) {
      parts.push_back(shifted(p, zero_width, Relation::GE));
      parts.push_back(shifted(p, -zero_width, Relation::LE));
    } else if (s > 0) {
      parts.push_back(shifted(p, -sign_width, Relation::GE));
    } else {
      parts.push_back(shifted(p, sign_width, Relation::LE));
    }
  }
  return conjunction(std::move(parts), k);
}

const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::CONVEX_CELL: return "CONVEX_CELL";
    case Certificate::ORACLE_CHECKED: return "ORACLE_CHECKED";
    case Certificate::USER_ASSERTED: return "USER_ASSERTED";
  }
  return "?";
}

const char* to_string(CoverBackend b) {
  switch (b) {
    case CoverBackend::SIGN_THICKENING: return "SIGN_THICKENING";
    case CoverBackend::GRID_CELLS: return "GRID_CELLS";
    case CoverBackend::USER: return "USER";
  }
  return "?";
}

Certificate certificate_from_string(const std::string& s) {
  if (s == "CONVEX_CELL") return Certificate::CONVEX_CELL;
  if (s == "ORACLE_CHECKED") return Certificate::ORACLE_CHECKED;
  if (s == "USER_ASSERTED") return Certificate::USER_ASSERTED;
  throw Error(ErrorKind::InvalidArgument, "unknown certificate " + s);
}

CoverBackend backend_from_string(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return c == '-' ? '_' : static_cast<char>(std::toupper(c)); });
  if (u == "SIGN_THICKENING") return CoverBackend::SIGN_THICKENING;
  if (u == "GRID_CELLS") return CoverBackend::GRID_CELLS;
  if (u == "USER") return CoverBackend::USER;
  throw Error(ErrorKind::InvalidArgument, "unknown cover backend " + s);
}

bool CoverReport::pass() const {
  if (!uncovered.empty()) return false;
  return std::all_of(outside_ambient.begin(), outside_ambient.end(), [](const auto& v) { return v.empty(); });
}

PieceRaster rasterize_cover(const Cover& cover, int depth) {
  std::vector<Formula> regions;
  std::vector<std::size_t> region_of;
  for (const CoverSet& p : cover.pieces) {
    auto it = std::find(regions.begin(), regions.end(), p.region);
    if (it == regions.end()) {
      regions.push_back(p.region);
      it = regions.end() - 1;
    }
    region_of.push_back(static_cast<std::size_t>(it - regions.begin()));
  }
  // Lattice boxes of the cells, found on a formula-free raster of the same depth.
  const DyadicRaster probe({}, cover.box, depth);
  const int k = static_cast<int>(cover.box.size());
  std::vector<std::pair<Lattice, Lattice>> cuts;
  std::vector<std::pair<Lattice, Lattice>> cell_of;
  for (const CoverSet& p : cover.pieces) {
    std::pair<Lattice, Lattice> c{Lattice{0, 0, 0}, Lattice{0, 0, 0}};
    for (int a = 0; a < k; ++a) c.second[static_cast<std::size_t>(a)] = std::int64_t{1} << depth;
    if (p.cell) {
      const auto lb = probe.lattice_box(*p.cell);
      if (!lb) throw Error(ErrorKind::InvalidArgument, "piece cell is not aligned with the raster of depth " + std::to_string(depth));
      c = *lb;
      cuts.push_back(c);
    }
    cell_of.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  PieceRaster out;
  out.raster = std::make_shared<DyadicRaster>(regions, cover.box, depth, 0, Enclosure::Centered, cuts);
  const DyadicRaster& r = *out.raster;
  out.piece_leaves.resize(cover.pieces.size());
  for (std::size_t i = 0; i < cover.pieces.size(); ++i) {
    for (std::size_t l = 0; l < r.leaves().size(); ++l) {
      if (kept(r.label(l, region_of[i]), cover.mode) && r.leaf_inside(l, cell_of[i].first, cell_of[i].second)) {
        out.piece_leaves[i].push_back(static_cast<int>(l));
      }
    }
  }
  return out;
}

Cover build_cover(const Formula& s_formula, const std::vector<MultiPoly>& family, const EpsilonSchedule& eps,
                  CoverBackend backend) {
  CoverOptions o;
  o.backend = backend;
  return build_cover(s_formula, family, eps, o);
}

Cover build_cover(const Formula& s_formula, const std::vector<MultiPoly>& family, const EpsilonSchedule& eps,
                  const CoverOptions& options) {
  const int k = s_formula.variable_count();
  Cover cover;
  cover.ambient = s_formula;
  cover.box = resolve_box(s_formula, options.box);
  cover.mode = options.mode;
  cover.depth = options.depth;
  if (!is_p_closed(s_formula)) {
    cover.warnings.push_back("ambient formula is not P-closed; pieces may not be closed sets");
  }
  switch (options.backend) {
    case CoverBackend::GRID_CELLS: {
      const int block = std::min(options.block_level, options.depth);
      const DyadicRaster raster({s_formula}, cover.box, options.depth, block);
      const PieceBuilder builder(raster, 0, options.mode);
      std::vector<PieceBuilder::Piece> pieces;
      const std::int64_t blocks = std::int64_t{1} << block;
      Lattice c{0, 0, 0};
      const std::int64_t total = k == 1 ? blocks : (k == 2 ? blocks * blocks : blocks * blocks * blocks);
      for (std::int64_t n = 0; n < total; ++n) {
        std::int64_t rest = n;
        for (int a = 0; a < k; ++a) {
          c[static_cast<std::size_t>(a)] = rest % blocks;
          rest /= blocks;
        }
        builder.split_node(block, c, pieces);
      }
      add_pieces(cover, raster, 0, s_formula, pieces);
      break;
    }
    case CoverBackend::SIGN_THICKENING: {
      const auto sigmas = enumerate_sign_conditions(family, s_formula, 32, cover.box);
      std::vector<Formula> regions;
      for (const SignCondition& s : sigmas) {
        if (level(s) == 0) cover.warnings.push_back("level-0 sign condition uses no thickening");
        regions.push_back(sigma_minus_plus(s, eps, s_formula));
      }
      if (regions.empty()) break;
      const DyadicRaster raster(regions, cover.box, options.depth);
      for (std::size_t f = 0; f < regions.size(); ++f) {
        const PieceBuilder builder(raster, f, options.mode);
        std::vector<PieceBuilder::Piece> pieces;
        builder.split_components(pieces);
        if (builder.split_everything()) {
          cover.warnings.push_back("sign piece " + std::to_string(f) + " split into blocks");
        }
        add_pieces(cover, raster, f, regions[f], pieces);
      }
      break;
    }
    case CoverBackend::USER: {
      for (const Formula& f : options.user_pieces) {
        CoverSet s;
        s.formula = f;
        s.region = f;
        s.certificate = Certificate::USER_ASSERTED;
        if (!is_p_closed(f)) s.notes.push_back("piece formula is not P-closed");
        cover.pieces.push_back(std::move(s));
      }
      break;
    }
  }
  if (cover.pieces.empty()) {
    cover.warnings.push_back("empty cover: the set has no raster cells at this depth");
  }
  cover.verification = verify_cover(cover, options.verify_resolution > 0 ? options.verify_resolution : (1 << options.depth));
  if (!cover.verification->pass()) {
    throw Error(ErrorKind::CoverageGap, std::to_string(cover.verification->uncovered.size()) +
                                            " uncovered boxes inside the set");
  }
  return cover;
}

namespace {

struct Verifier {
  const Cover& cover;
  int depth;
  std::vector<BoxClassifier> pieces;
  BoxClassifier ambient;
  CoverReport report;

  Verifier(const Cover& c, int d) : cover(c), depth(d), ambient(c.ambient, Enclosure::Natural) {
    for (const CoverSet& p : c.pieces) pieces.emplace_back(p.formula, Enclosure::Natural);
    report.outside_ambient.resize(c.pieces.size());
  }

  void run(const Box& box, int level, std::vector<BoxLabel> amb_state, std::vector<int> candidates,
           std::vector<std::vector<BoxLabel>> states) {
    const BoxLabel s = ambient.classify(box, amb_state);
    std::vector<int> live;
    bool covered = false;
    for (int i : candidates) {
      const auto u = static_cast<std::size_t>(i);
      const BoxLabel l = pieces[u].classify(box, states[u]);
      if (l == BoxLabel::OUTSIDE) continue;
      if (l == BoxLabel::INSIDE) {
        covered = true;
        if (s == BoxLabel::OUTSIDE) report.outside_ambient[u].push_back(box);
      }
      live.push_back(i);
    }
    if (s == BoxLabel::INSIDE && covered) return;
    if (s == BoxLabel::OUTSIDE && live.empty()) return;
    if (level >= depth) {
      if (s == BoxLabel::INSIDE) {
        // Several pieces may share the box; a gap is certified by a sample
        // point of the set lying in no piece.
        const Point m = box_midpoint(box);
        const bool hit = std::any_of(live.begin(), live.end(),
                                     [&](int i) { return cover.pieces[static_cast<std::size_t>(i)].formula.holds_at(m); });
        if (!hit) report.uncovered.push_back(box);
      }
      return;
    }
    const int k = static_cast<int>(box.size());
    for (int child = 0; child < (1 << k); ++child) {
      Box b = box;
      for (int a = 0; a < k; ++a) {
        const auto u = static_cast<std::size_t>(a);
        const Rational mid = box[u].midpoint();
        b[u] = ((child >> a) & 1) ? Interval(mid, box[u].hi()) : Interval(box[u].lo(), mid);
      }
      run(b, level + 1, amb_state, live, states);
    }
  }
};

}  // namespace

CoverReport verify_cover(const Cover& cover, int resolution) {
  int depth = 0;
  while ((1 << depth) < resolution) ++depth;
  Verifier v(cover, depth);
  std::vector<int> all(cover.pieces.size());
  std::vector<std::vector<BoxLabel>> states;
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = static_cast<int>(i);
    states.emplace_back(v.pieces[i].atom_count(), BoxLabel::UNKNOWN);
  }
  v.run(cover.box, 0, std::vector<BoxLabel>(v.ambient.atom_count(), BoxLabel::UNKNOWN), all, std::move(states));
  return v.report;
}

nlohmann::json cover_to_json(const Cover& cover) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const CoverSet& p : cover.pieces) {
    nlohmann::json j{{"formula", to_json(p.formula)}, {"certificate", to_string(p.certificate)}};
    j["witness"] = p.witness ? rational_list(*p.witness) : nlohmann::json(nullptr);
    if (p.oracle) j["oracle"] = {{"b0", p.oracle->b0}, {"b1", p.oracle->b1}, {"b2", p.oracle->b2}};
    if (p.cell) j["cell"] = box_to_json(*p.cell);
    if (!(p.region == p.formula)) j["region"] = to_json(p.region);
    if (!p.notes.empty()) j["notes"] = p.notes;
    pieces.push_back(std::move(j));
  }
  nlohmann::json out{{"ambient", to_json(cover.ambient)},
                     {"box", box_to_json(cover.box)},
                     {"mode", cover.mode == RasterMode::INNER ? "INNER" : "OUTER"},
                     {"depth", cover.depth},
                     {"pieces", std::move(pieces)},
                     {"warnings", cover.warnings}};
  if (cover.verification) {
    nlohmann::json outside = nlohmann::json::array();
    for (const auto& v : cover.verification->outside_ambient) outside.push_back(v.size());
    nlohmann::json unc = nlohmann::json::array();
    for (const Box& b : cover.verification->uncovered) unc.push_back(box_to_json(b));
    out["verification"] = {{"pass", cover.verification->pass()}, {"uncovered", unc}, {"outside_ambient", outside}};
  }
  return out;
}

Cover cover_from_json(const nlohmann::json& j, int variable_count) {
  Cover cover;
  cover.ambient = formula_from_json(j.at("ambient"), variable_count);
  cover.box = j.contains("box") ? box_from_json(j.at("box")) : resolve_box(cover.ambient, std::nullopt);
  if (j.contains("mode")) cover.mode = j.at("mode").get<std::string>() == "INNER" ? RasterMode::INNER : RasterMode::OUTER;
  if (j.contains("depth")) cover.depth = j.at("depth").get<int>();
  for (const auto& pj : j.at("pieces")) {
    CoverSet s;
    s.formula = formula_from_json(pj.at("formula"), variable_count);
    s.region = pj.contains("region") ? formula_from_json(pj.at("region"), variable_count) : s.formula;
    s.certificate = pj.contains("certificate") ? certificate_from_string(pj.at("certificate").get<std::string>())
                                               : Certificate::USER_ASSERTED;
    if (pj.contains("witness") && !pj.at("witness").is_null()) {
      Point w;
      for (const auto& x : pj.at("witness")) w.push_back(Rational::parse(x.get<std::string>()));
      s.witness = w;
    }
    if (pj.contains("cell")) s.cell = box_from_json(pj.at("cell"));
    if (pj.contains("oracle")) {
      const auto& o = pj.at("oracle");
      s.oracle = BettiNumbers{o.at("b0").get<int>(), o.at("b1").get<int>(), o.value("b2", 0)};
    }
    cover.pieces.push_back(std::move(s));
  }
  if (cover.pieces.empty()) throw Error(ErrorKind::InvalidArgument, "a cover needs at least one piece");
  return cover;
}

}  // namespace sabetti
