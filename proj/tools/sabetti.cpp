// Command-line front end: betti, components, roadmap, cover, oracle.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sabetti/covering.hpp"
#include "sabetti/cubical.hpp"
#include "sabetti/error.hpp"
#include "sabetti/mayer_vietoris.hpp"
#include "sabetti/pipeline.hpp"
#include "sabetti/roadmap.hpp"

using nlohmann::json;
using namespace sabetti;

namespace {

constexpr int kInputError = 2;
constexpr int kNotConverged = 3;
constexpr int kInconsistent = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConverged:
    case ErrorKind::NotStabilized:
    case ErrorKind::ResolutionExhausted:
      return kNotConverged;
    case ErrorKind::CoverageGap:
    case ErrorKind::AmbiguousInclusion:
    case ErrorKind::IncompleteIncidence:
    case ErrorKind::NegativeBetti:
    case ErrorKind::BranchMatchFailure:
    case ErrorKind::NotIsolating:
      return kInconsistent;
    default:
      return kInputError;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool looks_like_json(const std::string& text) {
  const auto p = text.find_first_not_of(" \t\r\n");
  return p != std::string::npos && (text[p] == '{' || text[p] == '[');
}

Formula load_formula(const std::string& path, int k) {
  const std::string text = read_file(path);
  if (looks_like_json(text)) return formula_from_json(json::parse(text), k);
  return parse_formula(text, k);
}

MultiPoly load_poly(const std::string& path) {
  const std::string text = read_file(path);
  if (looks_like_json(text)) return poly_from_json(json::parse(text), 2);
  return parse_poly(text, 2);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// "lo,hi;lo,hi;..."
Box parse_box(const std::string& s, int k) {
  Box box;
  for (const auto& side : split(s, ';')) {
    const auto ends = split(side, ',');
    if (ends.size() != 2) throw Error(ErrorKind::InvalidArgument, "box side '" + side + "' is not lo,hi");
    box.emplace_back(Rational::parse(ends[0]), Rational::parse(ends[1]));
  }
  if (static_cast<int>(box.size()) != k) throw Error(ErrorKind::DimensionMismatch, "box has the wrong number of sides");
  return box;
}

Point parse_point(const std::string& s) {
  Point p;
  for (const auto& c : split(s, ',')) p.push_back(Rational::parse(c));
  return p;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << '\n';
}

struct Common {
  std::string formula;
  int vars = 2;
  std::string box;
  std::string json_out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--formula", c.formula, "S-expression or JSON formula file")->required()->check(CLI::ExistingFile);
  app->add_option("--vars", c.vars, "Number of variables")->required()->check(CLI::Range(1, 3));
  app->add_option("--box", c.box, "Bounding box \"lo,hi;lo,hi;...\"");
  app->add_option("--json", c.json_out, "Write the report here instead of stdout");
}

struct PipelineFlags {
  std::string eta = "1/2";
  int depth = 0;
  int max_depth = 0;
  std::string backend = "GRID_CELLS";
  int verbosity = 0;
};

void add_pipeline_flags(CLI::App* app, PipelineFlags& p) {
  app->add_option("--eta", p.eta, "Epsilon base p/q in (0,1)");
  app->add_option("--depth", p.depth, "First raster depth");
  app->add_option("--max-depth", p.max_depth, "Last raster depth");
  app->add_option("--backend", p.backend, "SIGN_THICKENING, GRID_CELLS");
  app->add_flag("-v,--verbose", p.verbosity, "Progress on stderr (repeat for more)");
}

PipelineConfig make_config(const Common& c, const PipelineFlags& p) {
  PipelineConfig cfg;
  if (!c.box.empty()) cfg.box = parse_box(c.box, c.vars);
  cfg.eta = Rational::parse(p.eta);
  cfg.depth = p.depth;
  cfg.max_depth = p.max_depth;
  cfg.backend = backend_from_string(p.backend);
  cfg.verbosity = p.verbosity;
  return cfg;
}

Box resolve_box(const Common& c, const Formula& f, const Rational& radius) {
  if (!c.box.empty()) return parse_box(c.box, c.vars);
  if (auto b = infer_bounding_box(f)) return *b;
  return cube(c.vars, radius);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Betti numbers, connected components and roadmaps of semi-algebraic sets"};
  app.require_subcommand(1);

  Common betti_c;
  PipelineFlags betti_p;
  bool closed = false;
  bool oracle_check = false;
  int oracle_res = 0;
  auto* betti = app.add_subcommand("betti", "b0 and b1 through a certified cover");
  add_common(betti, betti_c);
  add_pipeline_flags(betti, betti_p);
  betti->add_flag("--closed", closed, "Input is P-closed; skip the closed replacement");
  betti->add_flag("--oracle-check", oracle_check, "Cross-check with the cubical oracle");
  betti->add_option("--oracle-max-resolution", oracle_res, "Oracle resolution limit");

  Common comp_c;
  PipelineFlags comp_p;
  auto* comps = app.add_subcommand("components", "Connected components with sample points");
  add_common(comps, comp_c);
  add_pipeline_flags(comps, comp_p);

  std::string poly_path, svg_path, roadmap_json;
  std::vector<std::string> points;
  bool pseudo = false;
  std::string zeta = "1/16";
  auto* roadmap = app.add_subcommand("roadmap", "Topology graph of a plane curve q(x1, x2) = 0");
  roadmap->add_option("--poly", poly_path, "S-expression or JSON polynomial file")->required()->check(CLI::ExistingFile);
  roadmap->add_option("--svg", svg_path, "Write an SVG drawing");
  roadmap->add_option("--json", roadmap_json, "Write the report here instead of stdout");
  roadmap->add_option("--point", points, "Connect the point \"x,y\" of the curve to the roadmap");
  roadmap->add_flag("--pseudo-critical", pseudo, "Also report limits of critical values of the deformed curve");
  roadmap->add_option("--zeta", zeta, "First deformation parameter");

  Common cover_c;
  std::string cover_backend = "GRID_CELLS", cover_mode = "OUTER", pieces_path;
  int cover_depth = 7;
  auto* cover = app.add_subcommand("cover", "Build and verify a cover, then its nerve Betti numbers");
  add_common(cover, cover_c);
  cover->add_option("--backend", cover_backend, "SIGN_THICKENING, GRID_CELLS, USER");
  cover->add_option("--depth", cover_depth, "Raster depth");
  cover->add_option("--mode", cover_mode, "INNER or OUTER");
  cover->add_option("--pieces", pieces_path, "Cover JSON for the USER backend")->check(CLI::ExistingFile);

  Common oracle_c;
  int max_res = 0;
  std::string dump_path;
  auto* oracle = app.add_subcommand("oracle", "Cubical homology readings at growing resolutions");
  add_common(oracle, oracle_c);
  oracle->add_option("--max-resolution", max_res, "Largest grid resolution");
  oracle->add_option("--dump", dump_path, "Write the outer complex at the accepted resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kInputError;
  }

  std::string out_path;
  try {
    if (betti->parsed()) {
      out_path = betti_c.json_out;
      const Formula f = load_formula(betti_c.formula, betti_c.vars);
      PipelineConfig cfg = make_config(betti_c, betti_p);
      cfg.oracle_check = oracle_check;
      cfg.oracle_max_resolution = oracle_res;
      const BettiReport r = closed ? betti1_closed(f, cfg) : betti1_general(f, cfg);
      emit(r.to_json(), out_path);
      if (!r.converged) return kNotConverged;
      if (r.oracle && r.oracle->oracle.converged && !r.oracle->agrees) return kInconsistent;
      return 0;
    }
    if (comps->parsed()) {
      out_path = comp_c.json_out;
      const Formula f = load_formula(comp_c.formula, comp_c.vars);
      const ComponentsReport r = components(f, make_config(comp_c, comp_p));
      emit(r.to_json(), out_path);
      if (!r.converged) return kNotConverged;
      if (r.curve_count && *r.curve_count != r.count) return kInconsistent;
      return 0;
    }
    if (roadmap->parsed()) {
      out_path = roadmap_json;
      const MultiPoly q = load_poly(poly_path);
      std::vector<Point> inputs;
      for (const auto& s : points) inputs.push_back(parse_point(s));
      const RoadmapGraph g = build_roadmap(q, inputs);
      json j = roadmap_to_json(g);
      j["components"] = g.component_count();
      json paths = json::array();
      for (const Point& p : inputs) {
        const RoadmapPath path = connect_point(g, p);
        json samples = json::array();
        for (const auto& s : sample_path(g, path, 2, dyadic(1, 20))) {
          samples.push_back({{"x", s.point[0].str()}, {"y", s.point[1].str()}, {"residual", s.residual.str()}});
        }
        paths.push_back({{"start", path.start}, {"nodes", path.nodes}, {"edges", path.edges}, {"samples", samples}});
      }
      j["paths"] = paths;
      if (pseudo) {
        json values = json::array();
        for (const auto& v : pseudo_critical_x(q, false, Rational::parse(zeta))) {
          values.push_back({{"lo", v.isolating.lo().str()}, {"hi", v.isolating.hi().str()}, {"kind", to_string(v.kind)}});
        }
        j["pseudo_critical"] = values;
      }
      if (!svg_path.empty()) {
        std::ofstream svg(svg_path);
        if (!svg) throw Error(ErrorKind::InvalidArgument, "cannot write " + svg_path);
        write_svg(svg, g);
      }
      emit(j, out_path);
      return 0;
    }
    if (cover->parsed()) {
      out_path = cover_c.json_out;
      const Formula f = load_formula(cover_c.formula, cover_c.vars);
      CoverOptions o;
      o.backend = backend_from_string(cover_backend);
      o.depth = cover_depth;
      if (cover_mode != "INNER" && cover_mode != "OUTER") throw Error(ErrorKind::InvalidArgument, "mode is INNER or OUTER");
      o.mode = cover_mode == "INNER" ? RasterMode::INNER : RasterMode::OUTER;
      if (!cover_c.box.empty()) o.box = parse_box(cover_c.box, cover_c.vars);
      if (o.backend == CoverBackend::USER) {
        if (pieces_path.empty()) throw Error(ErrorKind::InvalidArgument, "the USER backend needs --pieces");
        const json pj = json::parse(read_file(pieces_path));
        for (const CoverSet& p : cover_from_json(pj, cover_c.vars).pieces) o.user_pieces.push_back(p.formula);
      }
      const auto family = f.atom_polynomials();
      const Cover cv = build_cover(f, family, EpsilonSchedule(Rational(1, 2), std::max<int>(2, 2 * static_cast<int>(family.size()))), o);
      const IncidenceData inc = build_incidence(cv, cover_depth);
      const MvBetti b = betti_from_cover(inc, cv);
      emit({{"cover", cover_to_json(cv)}, {"incidence", incidence_to_json(inc)}, {"betti", betti_to_json(b)}}, out_path);
      return 0;
    }
    if (oracle->parsed()) {
      out_path = oracle_c.json_out;
      const Formula f = load_formula(oracle_c.formula, oracle_c.vars);
      const Box box = resolve_box(oracle_c, f, Rational(4));
      const int res = max_res > 0 ? max_res : (oracle_c.vars <= 2 ? 2048 : 64);
      const StableBetti s = stable_betti(f, box, res);
      json readings = json::array();
      for (const auto& r : s.readings) {
        readings.push_back({{"resolution", r.resolution},
                            {"inner", {r.inner.b0, r.inner.b1, r.inner.b2}},
                            {"outer", {r.outer.b0, r.outer.b1, r.outer.b2}}});
      }
      emit({{"b0", s.b0}, {"b1", s.b1}, {"converged", s.converged}, {"resolution", s.resolution}, {"readings", readings}},
           out_path);
      if (!dump_path.empty() && s.resolution > 0) {
        std::ofstream dump(dump_path);
        write_complex(dump, rasterize(f, box, s.resolution, RasterMode::OUTER));
      }
      return s.converged ? 0 : kNotConverged;
    }
  } catch (const PipelineFailure& e) {
    std::cerr << "sabetti: " << e.what() << '\n';
    json j = e.partial();
    j["error"] = {{"kind", to_string(e.kind())}, {"message", e.message()}};
    try {
      emit(j, out_path);
    } catch (const Error&) {
    }
    return exit_code(e.kind());
  } catch (const Error& e) {
    std::cerr << "sabetti: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "sabetti: malformed JSON: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
