#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sabetti/multipoly.hpp"
#include "sabetti/unipoly.hpp"

namespace sabetti {

/// zeta * G_k(dbar, c) + (1 - zeta) * q with
/// G_k = c^dbar (x1^dbar + ... + xk^dbar + x2^2 + ... + xk^2) - (2k - 1).
MultiPoly deform(const MultiPoly& q, const Rational& zeta, const Rational& c, int dbar);

enum class ValueKind { PSEUDO_CRITICAL, INPUT_POINT, ENDPOINT };
const char* to_string(ValueKind k);

struct DistinguishedValue {
  /// A point interval for exact values.
  Interval isolating;
  ValueKind kind = ValueKind::PSEUDO_CRITICAL;
  /// Squarefree polynomial with exactly one root in `isolating`; zero when
  /// the value is only known as a limit of intervals.
  UniPoly defining;
};

struct PseudoCriticalOptions {
  /// Deformation parameters; c defaults to 1/(2R) for a radius R read off
  /// the curve, dbar to the least even degree above deg q.
  std::optional<Rational> c;
  int dbar = 0;
  int max_halvings = 14;
};

/// X1-critical values of the plane curve Z(q). With smooth_hint the roots of
/// Res_y(q, dq/dy) that carry a real critical point; otherwise limits of the
/// critical values of the deformed curve as zeta is halved from zeta_start,
/// accepted once the intervals are nested for two consecutive halvings.
std::vector<DistinguishedValue> pseudo_critical_x(const MultiPoly& q, bool smooth_hint, const Rational& zeta_start,
                                                  const PseudoCriticalOptions& options = {});

struct RoadmapNode {
  /// Index into RoadmapGraph::values.
  int value = 0;
  Interval y;
  /// Whether dq/dy vanishes at the point.
  bool critical = false;
  bool input = false;
};

struct RoadmapEdge {
  int from = 0;
  int to = 0;
  /// Segment between values[segment] and values[segment + 1].
  int segment = 0;
  /// Branch index in increasing y order over the segment.
  int branch = 0;
};

struct RoadmapGraph {
  MultiPoly q;
  std::vector<DistinguishedValue> values;
  /// Rational sample abscissa of each segment.
  std::vector<Rational> samples;
  std::vector<int> branch_counts;
  std::vector<RoadmapNode> nodes;
  std::vector<RoadmapEdge> edges;

  /// Component label per node.
  std::vector<int> component_labels() const;
  int component_count() const;
};

/// Topology graph of a bounded curve: nodes are the fiber points over the
/// distinguished values, edges the branches of Z(q) over the open intervals
/// between them. q must have no repeated factor.
RoadmapGraph build_roadmap(const MultiPoly& q, const std::vector<Point>& input_points = {});

int curve_components(const MultiPoly& q);

struct RoadmapPath {
  /// Node holding the point.
  int start = -1;
  /// Nodes visited, start first, ending at a node over a pseudo-critical value.
  std::vector<int> nodes;
  /// Edges traversed, one per step.
  std::vector<int> edges;
};

/// Path inside the curve from a rational point of Z(q) to a distinguished
/// point: the point is its own entry node, then graph edges by breadth-first
/// search with the leftmost target among the nearest.
RoadmapPath connect_point(const MultiPoly& q, const Point& point);
RoadmapPath connect_point(const RoadmapGraph& graph, const Point& point);

struct PathSample {
  Point point;
  Rational residual;
};

/// Points on every edge of the path at `per_edge` interior abscissae, with
/// y refined until |q| <= tolerance.
std::vector<PathSample> sample_path(const RoadmapGraph& graph, const RoadmapPath& path, int per_edge,
                                    const Rational& tolerance);

/// Number of distinct real roots of q(x, .) equals the branch count of the
/// segment containing x at `count` seeded random rational abscissae.
bool rm2_sampled(const RoadmapGraph& graph, int count, std::uint64_t seed);

nlohmann::json roadmap_to_json(const RoadmapGraph& g);
void write_svg(std::ostream& os, const RoadmapGraph& g);

}  // namespace sabetti
