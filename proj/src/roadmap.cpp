#include "sabetti/roadmap.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "sabetti/error.hpp"

namespace sabetti {

namespace {

UniPoly fiber(const MultiPoly& q, const Rational& x) { return q.substitute(0, x).to_unipoly(1); }

std::vector<Interval> real_roots(const UniPoly& p) {
  if (p.degree() < 1) return {};
  const UniPoly s = squarefree_part(p);
  const Rational b = root_bound(s) + Rational(1);
  return sturm_isolate(s, Interval(-b, b));
}

Interval refine(const UniPoly& p, const Interval& iv, const Rational& width) {
  if (iv.is_point() || iv.width() <= width) return iv;
  return refine_root(p, iv, width);
}

// Res_var(p, r), with the power rule when one side is free of the variable.
MultiPoly eliminate(const MultiPoly& p, const MultiPoly& r, int var) {
  const int dp = p.degree_in(var), dr = r.degree_in(var);
  if (dp == 0 && dr == 0) return MultiPoly::constant(p.variable_count(), Rational(1));
  if (dp == 0) return pow(p, static_cast<unsigned>(dr));
  if (dr == 0) return pow(r, static_cast<unsigned>(dp));
  return resultant(p, r, var);
}

// Geometry shared by every step: the curve, its y-derivative, and the
// eliminants of critical points in each coordinate.
struct Curve {
  MultiPoly q, qy;
  UniPoly ex;  // squarefree x-eliminant of q = dq/dy = 0
  UniPoly ey;  // squarefree y-eliminant of the same system
  UniPoly lc;  // leading coefficient of q in y
  std::vector<Interval> ey_roots;
  Rational y_bound;

  explicit Curve(const MultiPoly& poly) : q(poly), qy(poly.derivative(1)) {
    if (q.variable_count() != 2) throw Error(ErrorKind::DimensionUnsupported, "roadmaps are implemented for plane curves");
    if (q.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "the zero polynomial defines the whole plane");
    if (q.degree_in(1) == 0) {
      if (q.is_constant()) return;
      throw Error(ErrorKind::NonBoundedCurve, "curve made of vertical lines");
    }
    const UniPoly rx = eliminate(q, qy, 1).to_unipoly(0);
    const UniPoly ry = eliminate(q, qy, 0).to_unipoly(1);
    if (rx.is_zero() || ry.is_zero()) throw Error(ErrorKind::InvalidArgument, "q has a repeated factor");
    ex = rx.degree() >= 1 ? squarefree_part(rx) : UniPoly();
    ey = ry.degree() >= 1 ? squarefree_part(ry) : UniPoly();
    lc = q.coefficients_in(1).back().to_unipoly(0);
    ey_roots = real_roots(ey);
    y_bound = Rational(1);
    for (const Interval& r : ey_roots) y_bound = max(y_bound, max(r.lo().abs(), r.hi().abs()) + Rational(1));
    if (q.degree_in(0) > 0) {
      const UniPoly hx = eliminate(q, q.derivative(0), 0).to_unipoly(1);
      if (hx.is_zero()) throw Error(ErrorKind::NonBoundedCurve, "curve contains a horizontal line");
      for (const Interval& r : real_roots(hx)) y_bound = max(y_bound, max(r.lo().abs(), r.hi().abs()) + Rational(1));
    }
  }
};

struct FiberPoint {
  Interval y;
  bool critical = false;
};

std::vector<FiberPoint> exact_fiber(const Curve& c, const Rational& x) {
  const UniPoly f = fiber(c.q, x);
  if (f.is_zero()) throw Error(ErrorKind::NonBoundedCurve, "the curve contains the vertical line x = " + x.str());
  const UniPoly g = gcd(f, f.derivative());
  std::vector<FiberPoint> out;
  for (const Interval& j : real_roots(f)) out.push_back(FiberPoint{j, g.degree() > 0 && count_roots(g, j) > 0});
  return out;
}

// A real algebraic number alpha, the unique root of m in an isolating
// interval, with exact arithmetic in Q(alpha). m need not be irreducible: a
// zero test that finds a proper factor of m replaces m by the factor
// vanishing at alpha or by the cofactor.
class AlgebraicX {
 public:
  AlgebraicX(UniPoly m, Interval iv) : m_(std::move(m)), iv_(std::move(iv)) {}

  const Interval& interval() const { return iv_; }
  UniPoly reduce(const UniPoly& p) const { return m_.degree() < 1 ? p : divmod(p, m_).second; }

  bool is_zero(const UniPoly& p) {
    const UniPoly r = reduce(p);
    if (r.is_zero()) return true;
    if (r.degree() == 0) return false;
    const UniPoly g = gcd(r, m_);
    if (g.degree() < 1) return false;
    if (count_roots(g, iv_) > 0) {
      m_ = g.monic();
      return true;
    }
    m_ = divmod(m_, g).first;
    return false;
  }

  int sign(const UniPoly& p) {
    if (is_zero(p)) return 0;
    const UniPoly r = reduce(p);
    for (;;) {
      const Interval v = r(iv_);
      if (v.lo().sign() > 0) return 1;
      if (v.hi().sign() < 0) return -1;
      iv_ = refine_root(m_, iv_, iv_.width() / Rational(4));
    }
  }

  // Inverse of a nonzero element; is_zero has made it coprime to m.
  UniPoly inverse(const UniPoly& p) {
    if (is_zero(p)) throw Error(ErrorKind::InvalidArgument, "inverse of zero");
    UniPoly r0 = m_, r1 = reduce(p), s0, s1 = UniPoly::constant(Rational(1));
    while (r1.degree() > 0) {
      auto [quot, rem] = divmod(r0, r1);
      r0 = std::move(r1);
      r1 = std::move(rem);
      UniPoly next = s0 - quot * s1;
      s0 = std::move(s1);
      s1 = std::move(next);
    }
    return reduce((Rational(1) / r1.leading()) * s1);
  }

 private:
  UniPoly m_;
  Interval iv_;
};

// Polynomial in y over Q(alpha), lowest degree first, leading coefficient nonzero at alpha.
using AlgPoly = std::vector<UniPoly>;

void trim(AlgebraicX& a, AlgPoly& p) {
  while (!p.empty() && a.is_zero(p.back())) p.pop_back();
}

AlgPoly alg_rem(AlgebraicX& a, AlgPoly x, const AlgPoly& y) {
  const UniPoly inv = a.inverse(y.back());
  trim(a, x);
  while (x.size() >= y.size()) {
    const UniPoly f = a.reduce(x.back() * inv);
    const std::size_t shift = x.size() - y.size();
    for (std::size_t i = 0; i + 1 < y.size(); ++i) x[shift + i] = a.reduce(x[shift + i] - f * y[i]);
    x.pop_back();
    trim(a, x);
  }
  return x;
}

AlgPoly alg_derivative(AlgebraicX& a, const AlgPoly& p) {
  AlgPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(Rational(static_cast<long>(i)) * p[i]);
  trim(a, d);
  return d;
}

AlgPoly alg_gcd(AlgebraicX& a, AlgPoly x, AlgPoly y) {
  while (!y.empty()) {
    AlgPoly r = alg_rem(a, x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return x;
}

std::vector<AlgPoly> alg_sturm(AlgebraicX& a, const AlgPoly& p) {
  std::vector<AlgPoly> seq{p, alg_derivative(a, p)};
  while (!seq.back().empty()) {
    AlgPoly r = alg_rem(a, seq[seq.size() - 2], seq.back());
    for (UniPoly& c : r) c = -c;
    seq.push_back(std::move(r));
  }
  seq.pop_back();
  return seq;
}

int alg_sign_at(AlgebraicX& a, const AlgPoly& p, const Rational& y) {
  UniPoly v;
  Rational yp(1);
  for (const UniPoly& c : p) {
    v += yp * c;
    yp *= y;
  }
  return a.sign(v);
}

int alg_variations(AlgebraicX& a, const std::vector<AlgPoly>& seq, const Rational& y) {
  int count = 0, last = 0;
  for (const AlgPoly& p : seq) {
    const int s = alg_sign_at(a, p, y);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

// Fiber over an algebraic x: distinct real roots of q(alpha, y) isolated by
// Sturm sequences over Q(alpha); a root is critical when it is a root of
// gcd(q, dq/dy) as well.
std::vector<FiberPoint> algebraic_fiber(const Curve& c, DistinguishedValue& v) {
  AlgebraicX a(v.defining, v.isolating);
  AlgPoly f;
  for (const MultiPoly& coef : c.q.coefficients_in(1)) f.push_back(a.reduce(coef.to_unipoly(0)));
  trim(a, f);
  if (f.empty()) throw Error(ErrorKind::NonBoundedCurve, "the curve contains a vertical line");
  std::vector<FiberPoint> out;
  if (f.size() == 1) return out;
  const auto seq = alg_sturm(a, f);
  const AlgPoly df = alg_derivative(a, f);
  const AlgPoly g = alg_gcd(a, f, df);
  const std::vector<AlgPoly> gseq = g.size() >= 2 ? alg_sturm(a, g) : std::vector<AlgPoly>{};
  // Bisection points avoid roots of f so that every interval is isolating when closed.
  std::vector<std::pair<Rational, Rational>> stack{{-c.y_bound, c.y_bound}};
  auto vars = [&](const Rational& y) { return alg_variations(a, seq, y); };
  std::vector<Interval> roots;
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    const int n = vars(lo) - vars(hi);
    if (n == 0) continue;
    if (n == 1) {
      roots.emplace_back(lo, hi);
      continue;
    }
    Rational m = (lo + hi) / Rational(2);
    for (long t = 1; alg_sign_at(a, f, m) == 0; ++t) m = lo + (hi - lo) * Rational(t + 1, 2 * t + 3);
    stack.emplace_back(m, hi);
    stack.emplace_back(lo, m);
  }
  std::sort(roots.begin(), roots.end(), [](const Interval& x, const Interval& y) { return x.lo() < y.lo(); });
  for (const Interval& j : roots) {
    const bool crit = !gseq.empty() && alg_variations(a, gseq, j.lo()) - alg_variations(a, gseq, j.hi()) > 0;
    out.push_back(FiberPoint{j, crit});
  }
  v.isolating = a.interval();
  return out;
}

std::vector<FiberPoint> fiber_points(const Curve& c, DistinguishedValue& v) {
  if (v.isolating.is_point()) return exact_fiber(c, v.isolating.lo());
  return algebraic_fiber(c, v);
}

bool lc_vanishes(const Curve& c, const DistinguishedValue& v) {
  if (c.lc.degree() < 1) return false;
  if (v.isolating.is_point()) return c.lc(v.isolating.lo()).is_zero();
  const UniPoly g = gcd(v.defining, c.lc);
  return g.degree() > 0 && count_roots(g, v.isolating) > 0;
}

// Critical values that carry a real critical point, or where the fiber degree drops.
std::vector<DistinguishedValue> critical_values(const Curve& c) {
  std::vector<DistinguishedValue> out;
  if (c.ex.degree() < 1) return out;
  for (const Interval& r : real_roots(c.ex)) {
    DistinguishedValue v{r, ValueKind::PSEUDO_CRITICAL, c.ex};
    if (lc_vanishes(c, v)) {
      v.kind = ValueKind::ENDPOINT;
      out.push_back(v);
      continue;
    }
    const auto f = fiber_points(c, v);
    if (std::any_of(f.begin(), f.end(), [](const FiberPoint& p) { return p.critical; })) {
      v.isolating = refine(c.ex, v.isolating, dyadic(1, 10));
      out.push_back(v);
    }
  }
  return out;
}

Rational smallest_even_above(int d) { return Rational(d % 2 == 0 ? d + 2 : d + 1); }

}  // namespace

MultiPoly deform(const MultiPoly& q, const Rational& zeta, const Rational& c, int dbar) {
  if (dbar % 2 != 0) throw Error(ErrorKind::OddDegree, "dbar must be even");
  if (dbar <= q.degree()) throw Error(ErrorKind::DegreeTooSmall, "dbar must exceed deg q");
  const int k = q.variable_count();
  MultiPoly g(k);
  for (int i = 0; i < k; ++i) {
    const MultiPoly x = MultiPoly::variable(k, i);
    g += pow(x, static_cast<unsigned>(dbar));
    if (i >= 1) g += x * x;
  }
  g = pow(c, static_cast<unsigned>(dbar)) * g - MultiPoly::constant(k, Rational(2 * k - 1));
  return zeta * g + (Rational(1) - zeta) * q;
}

const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::PSEUDO_CRITICAL: return "PSEUDO_CRITICAL";
    case ValueKind::INPUT_POINT: return "INPUT_POINT";
    case ValueKind::ENDPOINT: return "ENDPOINT";
  }
  return "?";
}

std::vector<DistinguishedValue> pseudo_critical_x(const MultiPoly& q, bool smooth_hint, const Rational& zeta_start,
                                                  const PseudoCriticalOptions& options) {
  if (smooth_hint) return critical_values(Curve(q));
  if (!(zeta_start.sign() > 0 && zeta_start < Rational(1))) throw Error(ErrorKind::InvalidArgument, "zeta must lie in (0, 1)");
  Rational c = options.c ? *options.c : Rational(1, 16);
  if (!options.c) {
    // Radius from the critical values of q when they exist.
    try {
      const Curve cq(q);
      Rational r = cq.y_bound;
      for (const Interval& iv : real_roots(cq.ex)) r = max(r, max(iv.lo().abs(), iv.hi().abs()) + Rational(1));
      c = Rational(1) / (Rational(2) * r);
    } catch (const Error&) {
    }
  }
  const int dbar = options.dbar > 0 ? options.dbar : static_cast<int>(smallest_even_above(q.degree()).num().get_si());
  const Rational width = dyadic(1, 40);
  std::vector<std::vector<Rational>> history;
  std::vector<std::vector<Interval>> boxes;
  Rational zeta = zeta_start;
  for (int n = 0; n <= options.max_halvings; ++n, zeta /= Rational(2)) {
    const Curve cd(deform(q, zeta, c, dbar));
    std::vector<Rational> roots;
    for (const DistinguishedValue& v : critical_values(cd)) roots.push_back(refine(v.defining, v.isolating, width).midpoint());
    history.push_back(roots);
    const std::size_t h = history.size();
    if (h < 2 || history[h - 1].size() != history[h - 2].size()) {
      boxes.emplace_back();
      continue;
    }
    std::vector<Interval> cur;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      const Rational r = Rational(4) * (roots[j] - history[h - 2][j]).abs() + width;
      cur.emplace_back(roots[j] - r, roots[j] + r);
    }
    const auto& prev = boxes.back();
    bool nested = prev.size() == cur.size() && !cur.empty();
    for (std::size_t j = 0; nested && j < cur.size(); ++j) nested = prev[j].contains(cur[j]);
    if (nested || (cur.empty() && prev.empty() && h >= 3 && history[h - 3].empty())) {
      std::vector<DistinguishedValue> out;
      for (const Interval& iv : cur) out.push_back(DistinguishedValue{iv, ValueKind::PSEUDO_CRITICAL, UniPoly()});
      return out;
    }
    boxes.push_back(std::move(cur));
  }
  throw Error(ErrorKind::NotStabilized, "critical values of the deformed curve did not stabilize");
}

std::vector<int> RoadmapGraph::component_labels() const {
  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (const RoadmapEdge& e : edges) {
    const int a = find(e.from), b = find(e.to);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<int> label(nodes.size(), -1), root_label(nodes.size(), -1);
  int n = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto r = static_cast<std::size_t>(find(static_cast<int>(i)));
    if (root_label[r] < 0) root_label[r] = n++;
    label[i] = root_label[r];
  }
  return label;
}

int RoadmapGraph::component_count() const {
  const auto l = component_labels();
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1;
}

RoadmapGraph build_roadmap(const MultiPoly& q, const std::vector<Point>& input_points) {
  const Curve c(q);
  RoadmapGraph g;
  g.q = q;
  if (c.qy.is_zero()) return g;  // nonzero constant: empty curve
  g.values = critical_values(c);
  std::vector<Rational> inputs;
  for (const Point& p : input_points) {
    if (p.size() != 2) throw Error(ErrorKind::DimensionMismatch, "input points must be plane points");
    if (!q(p).is_zero()) throw Error(ErrorKind::PointNotOnCurve, "input point is not on the curve");
    if (std::find(inputs.begin(), inputs.end(), p[0]) == inputs.end()) inputs.push_back(p[0]);
  }
  for (const Rational& x0 : inputs) {
    bool merged = false;
    for (DistinguishedValue& v : g.values) {
      if (!v.isolating.contains(x0)) continue;
      if (v.defining(x0).is_zero()) {
        v.isolating = Interval(x0);
        merged = true;
      } else {
        // Shrink the interval until it leaves x0 out.
        while (v.isolating.contains(x0)) v.isolating = refine_root(v.defining, v.isolating, v.isolating.width() / Rational(4));
      }
    }
    if (!merged) g.values.push_back(DistinguishedValue{Interval(x0), ValueKind::INPUT_POINT, UniPoly({-x0, Rational(1)})});
  }
  std::sort(g.values.begin(), g.values.end(),
            [](const DistinguishedValue& a, const DistinguishedValue& b) { return a.isolating.lo() < b.isolating.lo(); });

  const std::size_t n = g.values.size();
  auto branches_at = [&](const Rational& x) { return real_roots(fiber(q, x)); };
  if (n == 0) {
    if (!branches_at(Rational(0)).empty()) throw Error(ErrorKind::NonBoundedCurve, "curve without critical values");
    return g;
  }
  if (!branches_at(g.values.front().isolating.lo() - Rational(1)).empty() ||
      !branches_at(g.values.back().isolating.hi() + Rational(1)).empty()) {
    throw Error(ErrorKind::NonBoundedCurve, "branches beyond the extreme critical values");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Rational s = (g.values[i].isolating.hi() + g.values[i + 1].isolating.lo()) / Rational(2);
    g.samples.push_back(s);
    g.branch_counts.push_back(static_cast<int>(branches_at(s).size()));
  }

  // Fiber nodes and, per value, the node reached by each branch on either side.
  std::vector<std::vector<int>> left_node(n), right_node(n);
  for (std::size_t i = 0; i < n; ++i) {
    DistinguishedValue& v = g.values[i];
    const std::vector<FiberPoint> fp = fiber_points(c, v);
    const int base = static_cast<int>(g.nodes.size());
    for (const FiberPoint& p : fp) {
      RoadmapNode node{static_cast<int>(i), p.y, p.critical, false};
      if (v.isolating.is_point()) {
        for (const Point& ip : input_points) {
          if (ip[0] == v.isolating.lo() && p.y.contains(ip[1])) node.input = true;
        }
      }
      g.nodes.push_back(node);
    }
    std::vector<Rational> seps;
    for (std::size_t j = 1; j < fp.size(); ++j) seps.push_back((fp[j - 1].y.hi() + fp[j].y.lo()) / Rational(2));
    const int left_count = i == 0 ? 0 : g.branch_counts[i - 1];
    const int right_count = i + 1 == n ? 0 : g.branch_counts[i];
    const Rational left_room = i == 0 ? Rational(1) : v.isolating.lo() - g.samples[i - 1];
    const Rational right_room = i + 1 == n ? Rational(1) : g.samples[i] - v.isolating.hi();
    Rational delta = min(left_room, right_room) / Rational(2);

    // Fiber point index of each branch at abscissa x, or nullopt when a
    // branch cannot be separated from a separator.
    auto assign = [&](const Rational& x, int expected) -> std::optional<std::vector<int>> {
      if (expected == 0) return std::vector<int>{};
      const UniPoly f = squarefree_part(fiber(q, x));
      std::vector<Interval> ys = real_roots(f);
      if (static_cast<int>(ys.size()) != expected) return std::nullopt;
      std::vector<int> idx;
      for (Interval y : ys) {
        for (int it = 0; it < 64; ++it) {
          const bool straddles = std::any_of(seps.begin(), seps.end(), [&](const Rational& s) { return y.contains(s); });
          if (!straddles) break;
          if (y.is_point()) return std::nullopt;
          y = refine_root(f, y, y.width() / Rational(4));
        }
        if (std::any_of(seps.begin(), seps.end(), [&](const Rational& s) { return y.contains(s); })) return std::nullopt;
        idx.push_back(static_cast<int>(std::count_if(seps.begin(), seps.end(), [&](const Rational& s) { return s < y.lo(); })));
      }
      return idx;
    };
    auto valid = [&](const std::vector<int>& l, const std::vector<int>& r) {
      for (std::size_t j = 0; j < fp.size(); ++j) {
        if (fp[j].critical) continue;
        const auto nl = std::count(l.begin(), l.end(), static_cast<int>(j));
        const auto nr = std::count(r.begin(), r.end(), static_cast<int>(j));
        if (nl != 1 || nr != 1) return false;
      }
      return true;
    };
    std::optional<std::pair<std::vector<int>, std::vector<int>>> last;
    bool done = false;
    for (int step = 0; step < 48 && !done; ++step, delta /= Rational(2)) {
      if (!v.isolating.is_point()) v.isolating = refine(v.defining, v.isolating, delta / Rational(4));
      const auto l = assign(v.isolating.lo() - delta, left_count);
      const auto r = assign(v.isolating.hi() + delta, right_count);
      if (!l || !r || !valid(*l, *r)) {
        last.reset();
        continue;
      }
      if (last && last->first == *l && last->second == *r) done = true;
      last = std::make_pair(*l, *r);
    }
    if (!done) throw Error(ErrorKind::BranchMatchFailure, "branches at value " + std::to_string(i) + " could not be matched");
    for (int j : last->first) left_node[i].push_back(base + j);
    for (int j : last->second) right_node[i].push_back(base + j);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (int b = 0; b < g.branch_counts[i]; ++b) {
      g.edges.push_back(RoadmapEdge{right_node[i][static_cast<std::size_t>(b)], left_node[i + 1][static_cast<std::size_t>(b)],
                                    static_cast<int>(i), b});
    }
  }
  return g;
}

int curve_components(const MultiPoly& q) { return build_roadmap(q).component_count(); }

RoadmapPath connect_point(const MultiPoly& q, const Point& point) { return connect_point(build_roadmap(q, {point}), point); }

RoadmapPath connect_point(const RoadmapGraph& g, const Point& point) {
  if (point.size() != 2 || !g.q(point).is_zero()) throw Error(ErrorKind::PointNotOnCurve, "point is not on the curve");
  RoadmapPath path;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const RoadmapNode& nd = g.nodes[i];
    const Interval& x = g.values[static_cast<std::size_t>(nd.value)].isolating;
    if (x.is_point() && x.lo() == point[0] && nd.y.contains(point[1])) path.start = static_cast<int>(i);
  }
  if (path.start < 0) throw Error(ErrorKind::PointNotOnCurve, "point is not a node of the roadmap; pass it as an input point");
  auto target = [&](int node) {
    return g.values[static_cast<std::size_t>(g.nodes[static_cast<std::size_t>(node)].value)].kind != ValueKind::INPUT_POINT;
  };
  std::vector<int> prev_edge(g.nodes.size(), -2), dist(g.nodes.size(), -1);
  std::vector<int> frontier{path.start};
  dist[static_cast<std::size_t>(path.start)] = 0;
  prev_edge[static_cast<std::size_t>(path.start)] = -1;
  int found = target(path.start) ? path.start : -1;
  while (found < 0 && !frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const RoadmapEdge& ed = g.edges[e];
        int w = -1;
        if (ed.from == u) w = ed.to;
        else if (ed.to == u) w = ed.from;
        if (w < 0 || dist[static_cast<std::size_t>(w)] >= 0) continue;
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        prev_edge[static_cast<std::size_t>(w)] = static_cast<int>(e);
        next.push_back(w);
      }
    }
    // Leftmost target among the nearest; nodes are stored in increasing x.
    for (int w : next) {
      if (target(w) && (found < 0 || w < found)) found = w;
    }
    frontier = std::move(next);
  }
  if (found < 0) {
    path.nodes.push_back(path.start);
    return path;
  }
  std::vector<int> nodes{found}, edges;
  for (int w = found; w != path.start;) {
    const RoadmapEdge& e = g.edges[static_cast<std::size_t>(prev_edge[static_cast<std::size_t>(w)])];
    edges.push_back(prev_edge[static_cast<std::size_t>(w)]);
    w = e.from == w ? e.to : e.from;
    nodes.push_back(w);
  }
  std::reverse(nodes.begin(), nodes.end());
  std::reverse(edges.begin(), edges.end());
  path.nodes = std::move(nodes);
  path.edges = std::move(edges);
  return path;
}

std::vector<PathSample> sample_path(const RoadmapGraph& g, const RoadmapPath& path, int per_edge,
                                    const Rational& tolerance) {
  std::vector<PathSample> out;
  for (int e : path.edges) {
    const RoadmapEdge& ed = g.edges[static_cast<std::size_t>(e)];
    const Rational a = g.values[static_cast<std::size_t>(ed.segment)].isolating.hi();
    const Rational b = g.values[static_cast<std::size_t>(ed.segment) + 1].isolating.lo();
    for (int j = 1; j <= per_edge; ++j) {
      const Rational x = a + (b - a) * Rational(j) / Rational(per_edge + 1);
      const UniPoly f = squarefree_part(fiber(g.q, x));
      const auto ys = real_roots(f);
      if (static_cast<int>(ys.size()) != g.branch_counts[static_cast<std::size_t>(ed.segment)]) {
        throw Error(ErrorKind::BranchMatchFailure, "branch count changed inside a segment");
      }
      Interval y = ys[static_cast<std::size_t>(ed.branch)];
      Rational res = g.q({x, y.midpoint()}).abs();
      while (res > tolerance) {
        y = refine_root(f, y, y.width() / Rational(16));
        res = g.q({x, y.midpoint()}).abs();
      }
      out.push_back(PathSample{{x, y.midpoint()}, res});
    }
  }
  return out;
}

bool rm2_sampled(const RoadmapGraph& g, int count, std::uint64_t seed) {
  if (g.values.size() < 2) return true;
  std::mt19937_64 rng(seed);
  const Rational lo = g.values.front().isolating.hi(), hi = g.values.back().isolating.lo();
  std::uniform_int_distribution<long> pick(1, (1L << 20) - 1);
  for (int s = 0; s < count; ++s) {
    const Rational x = lo + (hi - lo) * Rational(pick(rng), 1L << 20);
    std::size_t seg = 0;
    bool on_value = false;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      if (g.values[i].isolating.contains(x)) on_value = true;
      if (g.values[i].isolating.hi() < x) seg = i;
    }
    if (on_value) continue;
    if (static_cast<int>(real_roots(fiber(g.q, x)).size()) != g.branch_counts[seg]) return false;
  }
  return true;
}

nlohmann::json roadmap_to_json(const RoadmapGraph& g) {
  auto iv = [](const Interval& i) -> nlohmann::json {
    if (i.is_point()) return i.lo().str();
    return nlohmann::json::array({i.lo().str(), i.hi().str()});
  };
  nlohmann::json values = nlohmann::json::array(), nodes = nlohmann::json::array(), edges = nlohmann::json::array();
  for (const auto& v : g.values) values.push_back({{"x", iv(v.isolating)}, {"kind", to_string(v.kind)}});
  for (const auto& nd : g.nodes) {
    const auto& v = g.values[static_cast<std::size_t>(nd.value)];
    const char* kind = nd.input ? "INPUT_POINT" : (nd.critical ? "PSEUDO_CRITICAL" : "FIBER");
    nodes.push_back({{"x", iv(v.isolating)}, {"y", nlohmann::json::array({nd.y.lo().str(), nd.y.hi().str()})}, {"kind", kind}});
  }
  for (const auto& e : g.edges) {
    edges.push_back({{"type", "curve"},
                     {"from", e.from},
                     {"to", e.to},
                     {"xrange", {g.values[static_cast<std::size_t>(e.segment)].isolating.hi().str(),
                                 g.values[static_cast<std::size_t>(e.segment) + 1].isolating.lo().str()}},
                     {"branch", e.branch}});
  }
  return {{"values", values}, {"nodes", nodes}, {"edges", edges}, {"components", g.component_count()}};
}

void write_svg(std::ostream& os, const RoadmapGraph& g) {
  struct P { double x, y; };
  std::vector<std::vector<P>> lines;
  std::vector<P> dots;
  for (const auto& nd : g.nodes) {
    dots.push_back({g.values[static_cast<std::size_t>(nd.value)].isolating.midpoint().to_double(), nd.y.midpoint().to_double()});
  }
  for (const auto& e : g.edges) {
    std::vector<P> line{dots[static_cast<std::size_t>(e.from)]};
    RoadmapPath one;
    one.edges = {static_cast<int>(&e - g.edges.data())};
    for (const auto& s : sample_path(g, one, 16, dyadic(1, 12))) line.push_back({s.point[0].to_double(), s.point[1].to_double()});
    line.push_back(dots[static_cast<std::size_t>(e.to)]);
    lines.push_back(std::move(line));
  }
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  for (const P& p : dots) {
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x), y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
  }
  const double pad = 0.1 * std::max(x1 - x0, y1 - y0), scale = 400.0 / (std::max(x1 - x0, y1 - y0) + 2 * pad);
  auto X = [&](double x) { return (x - x0 + pad) * scale; };
  auto Y = [&](double y) { return (y1 + pad - y) * scale; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << X(x1 + pad) << "\" height=\"" << Y(y0 - pad) << "\">\n";
  for (const auto& l : lines) {
    os << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (const P& p : l) os << X(p.x) << ',' << Y(p.y) << ' ';
    os << "\"/>\n";
  }
  for (std::size_t i = 0; i < dots.size(); ++i) {
    const char* fill = g.nodes[i].input ? "darkorange" : (g.nodes[i].critical ? "crimson" : "black");
    os << "  <circle cx=\"" << X(dots[i].x) << "\" cy=\"" << Y(dots[i].y) << "\" r=\"3\" fill=\"" << fill << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace sabetti
