// Acceptance run over the corpus. Prints one PASS/FAIL line per criterion on
// stdout; per-case detail goes to stderr.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabetti/covering.hpp"
#include "sabetti/cubical.hpp"
#include "sabetti/gv_closure.hpp"
#include "sabetti/linalg.hpp"
#include "sabetti/mayer_vietoris.hpp"
#include "sabetti/multipoly.hpp"
#include "sabetti/pipeline.hpp"
#include "sabetti/roadmap.hpp"
#include "sabetti/unipoly.hpp"
#include "mv_cases.hpp"
#include "support.hpp"

using namespace sabetti;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Entry {
  std::string name;
  int k = 2;
  Formula f;
  int b0 = 0;
  int b1 = 0;
  bool closed = false;
};

struct Run {
  std::optional<BettiReport> report;
  std::string error;
  double seconds = 0;
  // Second of the two accepted radii, or the last radius tried.
  Rational radius = 1;
};

struct Verdict {
  bool pass = true;
  std::string summary;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int oracle_resolution(int k) { return k == 2 ? 2048 : 64; }
// Closed replacements and perturbations carry features of width eps_1 or
// delta; the oracle refines adaptively, so a higher cap costs little.
int fine_oracle_resolution(int k) { return k == 2 ? 8192 : 64; }

std::vector<Entry> load_corpus(const fs::path& dir) {
  std::ifstream m(dir / "manifest.json");
  if (!m) throw std::runtime_error("cannot open " + (dir / "manifest.json").string());
  std::vector<Entry> out;
  for (const json& e : json::parse(m)) {
    std::ifstream in(dir / e.at("file").get<std::string>());
    std::stringstream text;
    text << in.rdbuf();
    Entry x;
    x.name = e.at("name");
    x.k = e.at("vars");
    x.f = parse_formula(text.str(), x.k);
    x.b0 = e.at("b0");
    x.b1 = e.at("b1");
    x.closed = is_p_closed(x.f);
    out.push_back(std::move(x));
  }
  return out;
}

Run run_pipeline(const Entry& e, const PipelineConfig& cfg) {
  Run r;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.report = betti1_general(e.f, cfg);
    const json& md = r.report->metadata;
    if (md.contains("accepted_radii")) {
      r.radius = Rational::parse(md["accepted_radii"][1].get<std::string>());
    } else if (md.contains("radii") && !md["radii"].empty()) {
      r.radius = Rational::parse(md["radii"].back()["box"].get<std::string>());
    }
  } catch (const std::exception& ex) {
    r.error = ex.what();
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::string scientific(const Rational& x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x.to_double());
  return buf;
}

std::string pair(int a, int b) { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }

void collect_complex_ok(const json& j, int& seen, int& bad) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "complex_ok" && it->is_boolean()) {
        ++seen;
        if (!it->get<bool>()) ++bad;
      } else {
        collect_complex_ok(*it, seen, bad);
      }
    }
  } else if (j.is_array()) {
    for (const json& x : j) collect_complex_ok(x, seen, bad);
  }
}

// 1. Pipeline against the live oracle and the frozen values.
Verdict nerve_vs_oracle(const std::vector<Entry>& corpus, const std::vector<Run>& runs) {
  Verdict v;
  int agree = 0;
  double worst2 = 0, worst3 = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Entry& e = corpus[i];
    const Run& r = runs[i];
    (e.k == 2 ? worst2 : worst3) = std::max(e.k == 2 ? worst2 : worst3, r.seconds);
    if (!r.report) {
      v.pass = false;
      std::cerr << "  [1] " << e.name << ": error " << r.error << '\n';
      continue;
    }
    const StableBetti o = stable_betti(e.f, cube(e.k, r.radius), oracle_resolution(e.k));
    const bool ok = r.report->converged && o.converged && r.report->b0 == o.b0 && r.report->b1 == o.b1 &&
                    o.b0 == e.b0 && o.b1 == e.b1;
    std::cerr << "  [1] " << e.name << ": pipeline " << pair(r.report->b0, r.report->b1)
              << (r.report->converged ? "" : " unconverged") << ", oracle " << pair(o.b0, o.b1)
              << (o.converged ? "" : " unconverged") << ", frozen " << pair(e.b0, e.b1) << ", " << r.seconds << " s\n";
    if (ok) ++agree;
    v.pass = v.pass && ok;
  }
  const bool fast = worst2 <= 60 && worst3 <= 600;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/%zu entries agree; slowest k=2 %.1f s (target 60), k=3 %.1f s (target 600)",
                agree, corpus.size(), worst2, worst3);
  v.summary = buf;
  v.pass = v.pass && fast;
  return v;
}

// 2. Mayer-Vietoris hand cases, as incidence data and as geometric covers.
Verdict hand_cases() {
  Verdict v;
  const MvBetti arc = betti_from_cover(test::two_arc_circle());
  const MvBetti sec = betti_from_cover(test::three_sector_disk());
  const Cover arcs = test::annulus_arcs(7);
  const MvBetti garc = betti_from_cover(build_incidence(arcs, 7), arcs);
  const Cover sectors = test::disk_sectors(6);
  const MvBetti gsec = betti_from_cover(build_incidence(sectors, 6), sectors);
  const auto arc_ok = [](const MvBetti& b) { return b.rank_d1 == 1 && b.rank_d2 == 0 && b.b1 == 1; };
  const auto sec_ok = [](const MvBetti& b) { return b.rank_d2 == 1 && b.b1 == 0; };
  v.pass = arc_ok(arc) && arc_ok(garc) && sec_ok(sec) && sec_ok(gsec);
  v.summary = "2-arc ranks " + pair(arc.rank_d1, arc.rank_d2) + " b1=" + std::to_string(arc.b1) + " (geometric " +
              pair(garc.rank_d1, garc.rank_d2) + " b1=" + std::to_string(garc.b1) + "); 3-sector rank d2=" +
              std::to_string(sec.rank_d2) + " b1=" + std::to_string(sec.b1) + " (geometric rank d2=" +
              std::to_string(gsec.rank_d2) + " b1=" + std::to_string(gsec.b1) + ")";
  return v;
}

// 3. d2 d1 = 0 on every incidence built for the corpus and on random covers.
Verdict complex_property(const std::vector<Run>& runs) {
  Verdict v;
  int seen = 0, bad = 0;
  for (const Run& r : runs) {
    if (r.report) collect_complex_ok(r.report->metadata, seen, bad);
  }
  std::mt19937_64 rng(20240);
  int random_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Formula s = test::random_disk_union(rng);
    const Cover cover = test::grid_cover(s, 6);
    if (!complex_property_holds(delta_matrices(build_incidence(cover, 6)))) ++random_bad;
  }
  v.pass = seen > 0 && bad == 0 && random_bad == 0;
  v.summary = std::to_string(seen - bad) + "/" + std::to_string(seen) + " corpus incidences, " +
              std::to_string(100 - random_bad) + "/100 random grid-cell covers";
  return v;
}

// 4. Closed replacement X' keeps the oracle numbers of X, at eta and eta/2.
Verdict gv_invariance(const std::vector<Entry>& corpus, const std::vector<Run>& runs, const Rational& eta) {
  Verdict v;
  int checked = 0, agree = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Entry& e = corpus[i];
    if (e.closed) continue;
    const Box box = cube(e.k, runs[i].radius);
    const StableBetti x = stable_betti(e.f, box, fine_oracle_resolution(e.k));
    for (const Rational& h : {eta, eta / 2}) {
      ++checked;
      const ClosedReplacement rep = closed_replacement(e.f, box, h);
      StableBetti xp;
      if (rep.formula) {
        xp = stable_betti(*rep.formula, box, fine_oracle_resolution(e.k));
      } else {
        xp.converged = true;
      }
      const bool ok = x.converged && xp.converged && x.b0 == xp.b0 && x.b1 == xp.b1;
      std::cerr << "  [4] " << e.name << " eta=" << h << ": X " << pair(x.b0, x.b1) << ", X' " << pair(xp.b0, xp.b1)
                << (xp.converged ? "" : " unconverged") << '\n';
      if (ok) ++agree;
      v.pass = v.pass && ok;
    }
  }
  v.pass = v.pass && checked > 0;
  v.summary = std::to_string(agree) + "/" + std::to_string(checked) + " (entry, eta) pairs agree";
  return v;
}

// 5. Star perturbation keeps the oracle numbers, at delta and delta/2.
Verdict star_invariance(const std::vector<Entry>& corpus, const std::vector<Run>& runs, const Rational& eta) {
  Verdict v;
  int checked = 0, agree = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Entry& e = corpus[i];
    if (!e.closed) continue;
    const Box box = cube(e.k, runs[i].radius);
    const StableBetti s = stable_betti(e.f, box, fine_oracle_resolution(e.k));
    const Rational delta = perturbation_size(e.f, box, eta);
    for (const Rational& d : {delta, delta / 2}) {
      ++checked;
      const StableBetti st = stable_betti(star_perturbation(e.f, d), box, fine_oracle_resolution(e.k));
      const bool ok = s.converged && st.converged && s.b0 == st.b0 && s.b1 == st.b1;
      std::cerr << "  [5] " << e.name << " delta=" << d << ": S " << pair(s.b0, s.b1) << ", S* " << pair(st.b0, st.b1)
                << (st.converged ? "" : " unconverged") << '\n';
      if (ok) ++agree;
      v.pass = v.pass && ok;
    }
  }
  v.pass = v.pass && checked > 0;
  v.summary = std::to_string(agree) + "/" + std::to_string(checked) + " (entry, delta) pairs agree";
  return v;
}

// 6. Plane-curve roadmaps.
Verdict roadmaps() {
  struct Curve {
    const char* name;
    const char* q;
    Point point;
    Rational radius;
    // Half-width of the band |q| <= band whose components are counted.
    Rational band;
  };
  const std::vector<Curve> curves{
      {"circle", "(+ (^ x1 2) (^ x2 2) -1)", {Rational(0), Rational(1)}, 2, Rational(1, 4)},
      {"ellipse", "(+ (* 1/4 (^ x1 2)) (^ x2 2) -1)", {Rational(6, 5), Rational(4, 5)}, 4, Rational(1, 4)},
      {"two circles", "(* (+ (^ x1 2) (^ x2 2) -1) (+ (^ (- x1 4) 2) (^ x2 2) -1))", {Rational(3, 5), Rational(4, 5)}, 8, Rational(1)},
      {"quartic ovals", "(+ (^ (+ (^ x1 2) -4) 2) (* 4 (^ x2 2)) -4)", {Rational(2), Rational(1)}, 4, Rational(1, 4)},
  };
  const Rational tol(1, 1 << 20);
  Verdict v;
  int ok_count = 0;
  for (const Curve& c : curves) {
    const MultiPoly q = parse_poly(c.q, 2);
    bool ok = true;
    std::string note;
    try {
      const int comps = curve_components(q);
      const Formula thick = Formula::make_and({Formula::atom(q - MultiPoly::constant(2, c.band), Relation::LE),
                                               Formula::atom(q + MultiPoly::constant(2, c.band), Relation::GE)});
      const StableBetti o = stable_betti(thick, cube(2, c.radius), 2048);
      const RoadmapGraph g = build_roadmap(q, {c.point});
      const bool sampled = rm2_sampled(g, 50, 1234);
      const RoadmapPath path = connect_point(g, c.point);
      Rational worst = 0;
      int samples = 0;
      for (const PathSample& s : sample_path(g, path, 4, tol)) {
        worst = max(worst, s.residual);
        ++samples;
      }
      ok = o.converged && comps == o.b0 && sampled && worst <= tol && samples > 0;
      note = "components " + std::to_string(comps) + ", band b0 " + std::to_string(o.b0) + ", RM2 " +
             (sampled ? "ok" : "failed") + ", " + std::to_string(samples) + " path samples, max |q| " + scientific(worst);
    } catch (const std::exception& ex) {
      ok = false;
      note = std::string("error ") + ex.what();
    }
    std::cerr << "  [6] " << c.name << ": " << note << '\n';
    if (ok) ++ok_count;
    v.pass = v.pass && ok;
  }
  v.summary = std::to_string(ok_count) + "/4 curves";
  return v;
}

// 7. Rank, Sturm counts and resultants on constructed cases.
Verdict exact_algebra() {
  std::mt19937_64 rng(97);
  int rank_ok = 0, sturm_ok = 0, res_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 8), cols = 1 + static_cast<int>(rng() % 8);
    RatMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        m(i, j) = rng() % 3 == 0 ? Rational(0)
                                 : Rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 4));
      }
    }
    if (rows > 2 && trial % 2 == 0) m.row(rows - 1) = m.row(0) * Rational(3) - m.row(1);
    if (rat_rank(m) == test::naive_rank(m)) ++rank_ok;
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rational> roots;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) roots.emplace_back(static_cast<long>(rng() % 61) - 30, 1 + static_cast<long>(rng() % 5));
    if (trial % 3 == 0) roots.push_back(roots.back());
    const UniPoly p = UniPoly::from_roots(roots);
    const Interval range(-5, 5);
    const int expected = test::distinct_in(roots, range);
    if (count_roots(p, range) == expected && static_cast<int>(sturm_isolate(p, range).size()) == expected) ++sturm_ok;
  }
  const auto linear = [&] {
    return MultiPoly::variable(1, 0) -
           MultiPoly::constant(1, Rational(static_cast<long>(rng() % 31) - 15, 1 + static_cast<long>(rng() % 4)));
  };
  for (int trial = 0; trial < 50; ++trial) {
    MultiPoly a = linear() * linear(), b = linear();
    if (trial % 2 == 0) {
      const MultiPoly c = linear();
      a = a * c;
      b = b * c;
    }
    const bool common = gcd(a.to_unipoly(0), b.to_unipoly(0)).degree() > 0;
    if (resultant(a, b, 0).is_zero() == common) ++res_ok;
  }
  Verdict v;
  v.pass = rank_ok == 200 && sturm_ok == 100 && res_ok == 50;
  v.summary = "rank " + std::to_string(rank_ok) + "/200, Sturm " + std::to_string(sturm_ok) + "/100, resultant " +
              std::to_string(res_ok) + "/50";
  return v;
}

// 8. Reports without metadata are unchanged at depth + 1 and eta / 2.
Verdict determinism(const std::vector<Entry>& corpus, const std::vector<Run>& runs, const PipelineConfig& base) {
  Verdict v;
  int same = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Entry& e = corpus[i];
    PipelineConfig cfg = base;
    cfg.eta = base.eta / 2;
    cfg.depth = (e.k == 2 ? 5 : 4) + 1;
    const Run r = run_pipeline(e, cfg);
    const std::string a = runs[i].report ? report_result(runs[i].report->to_json()).dump() : "error: " + runs[i].error;
    const std::string b = r.report ? report_result(r.report->to_json()).dump() : "error: " + r.error;
    const bool ok = a == b && runs[i].report.has_value();
    std::cerr << "  [8] " << e.name << ": " << (ok ? "identical" : "differs") << " (" << r.seconds << " s)";
    if (!ok) std::cerr << "\n      default: " << a << "\n      refined: " << b;
    std::cerr << '\n';
    if (ok) ++same;
    v.pass = v.pass && ok;
  }
  v.summary = std::to_string(same) + "/" + std::to_string(corpus.size()) + " reports identical";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("corpus");
  std::vector<Entry> corpus;
  try {
    corpus = load_corpus(dir);
  } catch (const std::exception& ex) {
    std::cerr << "cannot load corpus: " << ex.what() << '\n';
    return 2;
  }

  const PipelineConfig cfg;
  std::vector<Run> runs;
  for (const Entry& e : corpus) runs.push_back(run_pipeline(e, cfg));

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"nerve vs oracle", [&] { return nerve_vs_oracle(corpus, runs); }},
      {"Mayer-Vietoris hand cases", [] { return hand_cases(); }},
      {"complex property d2 d1 = 0", [&] { return complex_property(runs); }},
      {"closed replacement invariance", [&] { return gv_invariance(corpus, runs, cfg.eta); }},
      {"star perturbation invariance", [&] { return star_invariance(corpus, runs, cfg.eta); }},
      {"roadmap correctness", [] { return roadmaps(); }},
      {"exact algebra", [] { return exact_algebra(); }},
      {"determinism at depth+1 and eta/2", [&] { return determinism(corpus, runs, cfg); }},
  };
  bool all = true;
  int n = 0;
  for (const auto& [title, check] : criteria) {
    ++n;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& ex) {
      v.pass = false;
      v.summary = std::string("error: ") + ex.what();
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << n << " " << title << ": " << v.summary << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
