#include "sabetti/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>

#include "sabetti/gv_closure.hpp"
#include "sabetti/mayer_vietoris.hpp"
#include "sabetti/roadmap.hpp"

namespace sabetti {

namespace {

using nlohmann::json;

const char* const kSignSamplingWarning =
    "IncompleteSignEnumeration: sign conditions are sampled at grid vertices; conditions realized only off the "
    "sampling lattice are missed";

json point_json(const Point& p) {
  json out = json::array();
  for (const Rational& r : p) out.push_back(r.str());
  return out;
}

json box_json(const Box& b) {
  json out = json::array();
  for (const Interval& iv : b) out.push_back({iv.lo().str(), iv.hi().str()});
  return out;
}

int first_depth(int k, const PipelineConfig& cfg) { return cfg.depth > 0 ? cfg.depth : (k <= 2 ? 5 : 4); }
int last_depth(int k, const PipelineConfig& cfg) { return cfg.max_depth > 0 ? cfg.max_depth : (k <= 2 ? 13 : 7); }

void add_warning(std::vector<std::string>& list, const std::string& w) {
  if (std::find(list.begin(), list.end(), w) == list.end()) list.push_back(w);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Rational perturbation_size(const Formula& f, const Box& box, const Rational& eta) {
  const auto polys = f.atom_polynomials();
  const int t = static_cast<int>(polys.size());
  Rational radius = 1;
  for (const Interval& iv : box) radius = max(radius, max(iv.lo().abs(), iv.hi().abs()));
  const Rational rd = pow(radius, static_cast<unsigned>(perturbation_degree(f)));
  Rational hmax = 1;
  for (int j = 1; j <= static_cast<int>(box.size()); ++j) hmax += pow(Rational(std::max(t, 1)), static_cast<unsigned>(j)) * rd;
  Rational scale = 1;
  while (scale < hmax) scale *= 2;
  return pow(eta, static_cast<unsigned>(2 * t + 1)) / scale;
}

namespace {

struct RadiusResult {
  int b0 = 0;
  int b1 = 0;
  bool converged = false;
  std::vector<std::string> warnings;
  json meta = json::object();
};

MvBetti mv_reading(const Formula& star, const Box& box, int depth, RasterMode mode, const PipelineConfig& cfg,
                   json& meta) {
  CoverOptions o;
  o.backend = cfg.backend;
  o.depth = depth;
  o.mode = mode;
  o.box = box;
  const auto family = star.atom_polynomials();
  const EpsilonSchedule eps(cfg.eta, std::max(2, 2 * static_cast<int>(family.size())));
  const Cover cov = build_cover(star, family, eps, o);
  const IncidenceData inc = build_incidence(cov, depth);
  MvBetti mv = betti_from_cover(inc, cov);
  meta = betti_to_json(mv);
  meta["pieces"] = cov.pieces.size();
  if (!cov.warnings.empty()) meta["cover_warnings"] = cov.warnings;
  return mv;
}

// Sandwich acceptance over depths: INNER and OUTER agree at d and d + 1.
// `shift` raises the depth limit so that the finest cells keep their size on
// larger cubes.
RadiusResult closed_at_radius(const Formula& s, const Box& box, const PipelineConfig& cfg, int shift) {
  RadiusResult out;
  const int k = static_cast<int>(box.size());
  const Rational delta = perturbation_size(s, box, cfg.eta);
  const Formula star = star_perturbation(s, delta);
  out.meta["delta"] = delta.str();
  json readings = json::array();
  std::optional<std::pair<MvBetti, MvBetti>> prev;
  for (int d = first_depth(k, cfg); d <= last_depth(k, cfg) + shift; ++d) {
    const auto t0 = std::chrono::steady_clock::now();
    json mi, mo;
    MvBetti inner, outer;
    try {
      inner = mv_reading(star, box, d, RasterMode::INNER, cfg, mi);
      outer = mv_reading(star, box, d, RasterMode::OUTER, cfg, mo);
    } catch (const Error& e) {
      out.meta["readings"] = readings;
      out.meta["failed_depth"] = d;
      throw PipelineFailure(e, out.meta);
    }
    readings.push_back({{"depth", d}, {"inner", mi}, {"outer", mo}, {"seconds", seconds_since(t0)}});
    for (const auto& w : inner.warnings) add_warning(out.warnings, w);
    if (cfg.verbosity >= 2) {
      std::cerr << "  depth " << d << ": inner (" << inner.b0 << "," << inner.b1 << ") outer (" << outer.b0 << ","
                << outer.b1 << ")\n";
    }
    const auto same = [](const MvBetti& a, const MvBetti& b) { return a.b0 == b.b0 && a.b1 == b.b1; };
    if (prev && same(prev->first, prev->second) && same(inner, outer) && same(prev->first, inner)) {
      out.b0 = inner.b0;
      out.b1 = inner.b1;
      out.converged = true;
      out.meta["accepted_depth"] = d - 1;
      break;
    }
    prev = std::make_pair(inner, outer);
  }
  out.meta["readings"] = std::move(readings);
  if (!out.converged && prev) {
    out.b0 = prev->first.b0;
    out.b1 = prev->first.b1;
  }
  return out;
}

std::optional<Formula> closed_replacement(const Formula& f, const Box& box, const PipelineConfig& cfg,
                                          const Rational& scale, json& meta, std::vector<std::string>& warnings) {
  const ClosedReplacement r = closed_replacement(f, box, cfg.eta, scale, cfg.sign_resolution);
  if (r.sampled) add_warning(warnings, kSignSamplingWarning);
  if (r.eps) meta["epsilon"] = r.eps->to_json();
  meta["sign_conditions"] = r.realizable.size();
  meta["satisfying"] = r.sigma.size();
  return r.formula;
}

Rational first_radius(const Formula& f, const PipelineConfig& cfg) {
  const auto b = infer_bounding_box(f);
  if (!b) return cfg.initial_radius;
  Rational m = 0;
  for (const Interval& iv : *b) m = max(m, max(iv.lo().abs(), iv.hi().abs()));
  Rational r = 1;
  while (r < m) r *= 2;
  return r;
}

// Runs at_radius on growing cubes until two consecutive radii agree.
BettiReport stabilize_radius(const Formula& f, const PipelineConfig& cfg,
                             const std::function<RadiusResult(const Box&, int)>& at_radius) {
  cfg.validate();
  const int k = f.variable_count();
  BettiReport report;
  json per_radius = json::array();
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = [&](const Box& box, const json& label, int shift) {
    if (cfg.verbosity >= 1) std::cerr << "box " << box_json(box).dump() << '\n';
    RadiusResult r;
    try {
      r = at_radius(box, shift);
    } catch (const PipelineFailure& e) {
      per_radius.push_back({{"box", label}, {"detail", e.partial()}});
      report.metadata["radii"] = per_radius;
      throw PipelineFailure(e, report.to_json());
    } catch (const Error& e) {
      report.metadata["radii"] = per_radius;
      throw PipelineFailure(e, report.to_json());
    }
    per_radius.push_back({{"box", label}, {"b0", r.b0}, {"b1", r.b1}, {"converged", r.converged}, {"detail", r.meta}});
    for (const auto& w : r.warnings) add_warning(report.warnings, w);
    return r;
  };

  Box final_box;
  if (cfg.box) {
    if (static_cast<int>(cfg.box->size()) != k) throw Error(ErrorKind::DimensionMismatch, "box dimension differs");
    const RadiusResult r = run(*cfg.box, box_json(*cfg.box), 0);
    report.b0 = r.b0;
    report.b1 = r.b1;
    report.converged = r.converged;
    final_box = *cfg.box;
  } else {
    Rational radius = first_radius(f, cfg);
    std::optional<RadiusResult> prev;
    bool last_converged = true;
    for (int i = 0; i <= cfg.max_doublings; ++i, radius *= 2) {
      const RadiusResult r = run(cube(k, radius), radius.str(), i);
      final_box = cube(k, radius);
      report.b0 = r.b0;
      report.b1 = r.b1;
      last_converged = r.converged;
      if (!r.converged) break;
      if (prev && prev->b0 == r.b0 && prev->b1 == r.b1) {
        report.converged = true;
        report.metadata["accepted_radii"] = {(radius / 2).str(), radius.str()};
        break;
      }
      prev = r;
    }
    if (!report.converged && prev && prev->converged && last_converged) {
      add_warning(report.warnings, "NotStabilized: Betti numbers changed under every radius doubling tried");
    }
  }
  const bool explained = std::any_of(report.warnings.begin(), report.warnings.end(),
                                     [](const std::string& w) { return w.rfind("NotStabilized", 0) == 0; });
  if (!report.converged && !explained) {
    add_warning(report.warnings, "NotConverged: covers did not stabilize up to the depth limit");
  }
  report.metadata["radii"] = std::move(per_radius);
  report.metadata["eta"] = cfg.eta.str();
  report.metadata["backend"] = to_string(cfg.backend);
  report.metadata["depth_range"] = {first_depth(k, cfg), last_depth(k, cfg)};

  if (cfg.oracle_check) {
    const int res = cfg.oracle_max_resolution > 0 ? cfg.oracle_max_resolution : (k <= 2 ? 2048 : 64);
    OracleCheck check;
    check.oracle = stable_betti(f, final_box, res);
    check.agrees = check.oracle.converged && check.oracle.b0 == report.b0 && check.oracle.b1 == report.b1;
    report.oracle = check;
    report.metadata["oracle_box"] = box_json(final_box);
    report.metadata["oracle_resolution"] = check.oracle.resolution;
  }
  report.metadata["seconds"] = seconds_since(t0);
  return report;
}

}  // namespace

void PipelineConfig::validate() const {
  if (eta.sign() <= 0 || eta >= Rational(1)) throw Error(ErrorKind::InvalidArgument, "eta must lie in (0, 1)");
  if (initial_radius.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "initial radius must be positive");
  if (max_doublings < 1) throw Error(ErrorKind::InvalidArgument, "at least one radius doubling is needed");
  if (max_scale_halvings < 1) throw Error(ErrorKind::InvalidArgument, "at least one scale halving is needed");
  if (depth < 0 || max_depth < 0 || sign_resolution < 1 || oracle_max_resolution < 0) {
    throw Error(ErrorKind::InvalidArgument, "limits must be positive");
  }
  if (depth > 0 && max_depth > 0 && depth >= max_depth) throw Error(ErrorKind::InvalidArgument, "depth must be below max_depth");
  if (box) {
    for (const Interval& iv : *box) {
      if (!(iv.lo() < iv.hi())) throw Error(ErrorKind::InvalidArgument, "box sides must have positive width");
    }
  }
}

ClosedReplacement closed_replacement(const Formula& f, const Box& box, const Rational& eta, const Rational& scale,
                                     int sign_resolution) {
  ClosedReplacement out;
  const int k = f.variable_count();
  const Formula s = box_formula(box);
  const auto family = f.atom_polynomials();
  if (family.empty()) {
    if (f.holds_at(Point(static_cast<std::size_t>(k), Rational(0)))) out.formula = s;
    return out;
  }
  out.sampled = true;
  for (const auto& w : enumerate_sign_conditions_witnessed(family, s, sign_resolution, box)) {
    out.realizable.push_back(w.sigma);
    if (f.holds_at(w.witness)) out.sigma.push_back(w.sigma);
  }
  int top = 1;
  for (const auto& tau : out.realizable) top = std::max(top, level(tau));
  out.eps = EpsilonSchedule(eta, 2 * top, scale);
  if (!out.sigma.empty()) out.formula = gv_replace(family, out.sigma, s, *out.eps, out.realizable);
  return out;
}

Box cube(int variable_count, const Rational& r) {
  return Box(static_cast<std::size_t>(variable_count), Interval(-r, r));
}

json BettiReport::to_json() const {
  json j{{"b0", b0}, {"b1", b1}, {"converged", converged}, {"warnings", warnings}};
  if (oracle) {
    j["oracle"] = {{"b0", oracle->oracle.b0},
                   {"b1", oracle->oracle.b1},
                   {"converged", oracle->oracle.converged},
                   {"agrees", oracle->agrees}};
  }
  j["metadata"] = metadata;
  return j;
}

json report_result(const json& report) {
  json out = report;
  out.erase("metadata");
  return out;
}

BettiReport betti1_closed(const Formula& f, const PipelineConfig& cfg) {
  if (!is_p_closed(f)) throw Error(ErrorKind::NotPClosed, "betti1_closed needs a negation-free formula with non-strict atoms");
  BettiReport r = stabilize_radius(f, cfg, [&](const Box& box, int shift) { return closed_at_radius(f, box, cfg, shift); });
  r.metadata["route"] = "closed";
  return r;
}

BettiReport betti1_general(const Formula& f, const PipelineConfig& cfg) {
  if (is_p_closed(f)) {
    BettiReport r = betti1_closed(f, cfg);
    r.metadata["route"] = "closed input";
    return r;
  }
  // The thickening widths carry no scale of their own: the schedule keeps
  // the ratio eta between levels and its overall scale is halved until two
  // consecutive scales give the same numbers.
  BettiReport r = stabilize_radius(f, cfg, [&](const Box& box, int shift) {
    RadiusResult out;
    std::optional<RadiusResult> prev;
    json per_scale = json::array();
    Rational scale = 1;
    for (int j = 0; j <= cfg.max_scale_halvings; ++j, scale /= 2) {
      json meta{{"scale", scale.str()}};
      const auto replaced = closed_replacement(f, box, cfg, scale, meta, out.warnings);
      RadiusResult r;
      if (!replaced) {
        r.converged = true;
        r.meta = meta;
        r.meta["empty"] = true;
        per_scale.push_back(r.meta);
        prev = r;
        break;
      }
      r = closed_at_radius(*replaced, box, cfg, shift);
      r.meta.update(meta);
      per_scale.push_back({{"scale", scale.str()}, {"b0", r.b0}, {"b1", r.b1}, {"converged", r.converged}, {"detail", r.meta}});
      for (const auto& w : r.warnings) add_warning(out.warnings, w);
      if (cfg.verbosity >= 1) {
        std::cerr << " scale " << scale << ": (" << r.b0 << "," << r.b1 << ")" << (r.converged ? "" : " not converged") << '\n';
      }
      if (r.converged && prev && prev->converged && prev->b0 == r.b0 && prev->b1 == r.b1) {
        out.converged = true;
        out.meta["accepted_scale"] = {(scale * 2).str(), scale.str()};
        prev = r;
        break;
      }
      if (!r.converged && prev && !prev->converged) break;
      prev = r;
    }
    if (prev) {
      out.b0 = prev->b0;
      out.b1 = prev->b1;
      if (prev->meta.contains("empty")) out.converged = true;
    }
    out.meta["scales"] = std::move(per_scale);
    if (!out.converged && prev && prev->converged) {
      add_warning(out.warnings, "NotStabilized: Betti numbers changed under every schedule scale tried");
    }
    return out;
  });
  r.metadata["route"] = "general";
  return r;
}

json ComponentsReport::to_json() const {
  json comps = json::array();
  json boxes = json::array();
  for (const auto& c : components) {
    comps.push_back({{"sample", point_json(c.point)}, {"in_set", c.in_set}});
    boxes.push_back(c.boxes.size());
  }
  json j{{"count", count}, {"converged", converged}, {"components", comps}, {"warnings", warnings}};
  if (curve_count) j["curve_count"] = *curve_count;
  j["metadata"] = metadata;
  j["metadata"]["boxes_per_component"] = boxes;
  return j;
}

namespace {

struct CountReading {
  int count = 0;
  bool converged = false;
  std::vector<ComponentSample> comps;
};

// The midpoint or a corner of the box when one satisfies f.
std::optional<Point> point_in(const Formula& f, const Box& b) {
  const Point m = box_midpoint(b);
  if (f.holds_at(m)) return m;
  const std::size_t k = b.size();
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    Point p(k);
    for (std::size_t a = 0; a < k; ++a) p[a] = (mask >> a) & 1 ? b[a].hi() : b[a].lo();
    if (f.holds_at(p)) return p;
  }
  return std::nullopt;
}

// Component count of a closed set, accepted when two consecutive depths agree.
CountReading count_closed(const Formula& f, const Formula& closed, const Box& box, const PipelineConfig& cfg, json& meta) {
  const int k = static_cast<int>(box.size());
  CountReading out;
  std::optional<int> prev;
  json counts = json::array();
  for (int d = first_depth(k, cfg); d <= last_depth(k, cfg); ++d) {
    const GridComponents g = grid_components(closed, box, d);
    const int n = static_cast<int>(g.components.size());
    counts.push_back({{"depth", d}, {"count", n}, {"exhausted", g.exhausted}});
    if (prev && *prev == n) {
      out.count = n;
      out.converged = true;
      for (const GridComponent& c : g.components) {
        ComponentSample s;
        s.boxes = c.boxes;
        for (const Box& b : c.boxes) {
          if (const auto p = point_in(f, b)) {
            s.point = *p;
            s.in_set = true;
            break;
          }
        }
        if (!s.in_set) s.point = c.witness ? *c.witness : box_midpoint(c.boxes.front());
        out.comps.push_back(std::move(s));
      }
      break;
    }
    prev = n;
  }
  meta["depths"] = std::move(counts);
  return out;
}

}  // namespace

ComponentsReport components(const Formula& f, const PipelineConfig& cfg) {
  cfg.validate();
  const int k = f.variable_count();
  const bool closed = is_p_closed(f);
  ComponentsReport report;
  json per_radius = json::array();

  const auto at_box = [&](const Box& box, const json& label) {
    json meta = json::object();
    CountReading out;
    if (closed) {
      out = count_closed(f, f, box, cfg, meta);
    } else {
      std::optional<CountReading> prev;
      json per_scale = json::array();
      Rational scale = 1;
      for (int j = 0; j <= cfg.max_scale_halvings; ++j, scale /= 2) {
        json m{{"scale", scale.str()}};
        const auto replaced = closed_replacement(f, box, cfg, scale, m, report.warnings);
        CountReading r;
        if (replaced) {
          r = count_closed(f, *replaced, box, cfg, m);
        } else {
          r.converged = true;
        }
        per_scale.push_back({{"count", r.count}, {"converged", r.converged}, {"detail", m}});
        const bool done = !replaced || (r.converged && prev && prev->converged && prev->count == r.count);
        prev = std::move(r);
        if (done) break;
        if (!prev->converged) break;
        if (j == cfg.max_scale_halvings) prev->converged = false;
      }
      out = std::move(*prev);
      meta["scales"] = std::move(per_scale);
    }
    per_radius.push_back({{"box", label}, {"count", out.count}, {"converged", out.converged}, {"detail", meta}});
    return out;
  };

  CountReading accepted;
  if (cfg.box) {
    accepted = at_box(*cfg.box, box_json(*cfg.box));
  } else {
    Rational radius = first_radius(f, cfg);
    std::optional<int> prev;
    for (int i = 0; i <= cfg.max_doublings; ++i, radius *= 2) {
      CountReading r = at_box(cube(k, radius), radius.str());
      const bool done = r.converged && prev && *prev == r.count;
      if (r.converged) prev = r.count;
      accepted = std::move(r);
      if (done) break;
      if (!accepted.converged) break;
      if (i == cfg.max_doublings) accepted.converged = false;
    }
  }
  report.count = accepted.count;
  report.converged = accepted.converged;
  report.components = std::move(accepted.comps);
  if (!report.converged) add_warning(report.warnings, "NotConverged: component count did not stabilize");

  if (k == 2 && f.kind() == Formula::Kind::Atom && f.atom().rel == Relation::EQ) {
    try {
      report.curve_count = curve_components(f.atom().poly);
      if (*report.curve_count != report.count) {
        add_warning(report.warnings, "curve route counts " + std::to_string(*report.curve_count) + " components");
      }
    } catch (const Error& e) {
      add_warning(report.warnings, std::string("curve route unavailable: ") + e.what());
    }
  }
  report.metadata["radii"] = std::move(per_radius);
  report.metadata["eta"] = cfg.eta.str();
  return report;
}

}  // namespace sabetti
