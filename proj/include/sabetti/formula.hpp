#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sabetti/grid_poly.hpp"
#include "sabetti/interval.hpp"
#include "sabetti/multipoly.hpp"

namespace sabetti {

enum class Relation { EQ, GT, LT, GE, LE };

/// "=0", ">0", "<0", ">=0", "<=0".
const char* to_string(Relation r);
/// Whether sign s in {-1,0,1} satisfies the relation.
bool satisfies(Relation r, int s);

struct Atom {
  MultiPoly poly;
  Relation rel = Relation::EQ;
  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class BoxLabel : std::int8_t { OUTSIDE = 0, INSIDE = 1, UNKNOWN = 2 };
const char* to_string(BoxLabel b);

/// Immutable quantifier-free formula over k variables. Nodes are shared, so
/// copies are cheap.
class Formula {
 public:
  enum class Kind { True, False, Atom, And, Or, Not };

  Formula() : Formula(truth(0)) {}

  static Formula truth(int variable_count);
  static Formula falsity(int variable_count);
  /// A constant polynomial yields TRUE or FALSE.
  static Formula atom(MultiPoly poly, Relation rel);
  /// Requires a nonempty list; children keep their order.
  static Formula make_and(std::vector<Formula> children);
  static Formula make_or(std::vector<Formula> children);
  static Formula make_not(Formula child);

  Kind kind() const { return node_->kind; }
  int variable_count() const { return node_->k; }
  const Atom& atom() const { return node_->atom; }
  const std::vector<Formula>& children() const { return node_->children; }

  bool holds_at(const Point& point) const;
  /// Atoms in depth-first order, duplicates included.
  std::vector<Atom> atoms() const;
  /// Distinct atom polynomials in first-occurrence order.
  std::vector<MultiPoly> atom_polynomials() const;
  /// Rebuilds the tree with every atom replaced by fn(atom).
  Formula map_atoms(const std::function<Formula(const Atom&)>& fn) const;

  /// S-expression form; parse_formula(str(), k) reproduces the formula.
  std::string str() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    int k;
    Atom atom;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Conjunction that collapses an empty list to TRUE and a single child to itself.
Formula conjunction(std::vector<Formula> children, int variable_count);
/// Disjunction that collapses an empty list to FALSE and a single child to itself.
Formula disjunction(std::vector<Formula> children, int variable_count);

Formula parse_formula(std::string_view text, int variable_count);
MultiPoly parse_poly(std::string_view text, int variable_count);
std::string poly_to_sexpr(const MultiPoly& p);

nlohmann::json poly_to_json(const MultiPoly& p);
MultiPoly poly_from_json(const nlohmann::json& j, int variable_count);
nlohmann::json to_json(const Formula& f);
Formula formula_from_json(const nlohmann::json& j, int variable_count);

/// No negation and only EQ/GE/LE atoms.
bool is_p_closed(const Formula& f);

struct SignCondition {
  std::vector<MultiPoly> family;
  std::vector<int> signs;
  friend bool operator==(const SignCondition&, const SignCondition&) = default;
};

SignCondition sign_condition_at(const std::vector<MultiPoly>& family, const Point& point);
/// Conjunction of Q = 0 over z_family and the exact sign atoms of sigma.
Formula realize(const SignCondition& sigma, const std::vector<MultiPoly>& z_family = {});
/// Signs relaxed to EQ (0), GE (+1), LE (-1).
Formula weak_relaxation(const SignCondition& sigma);

/// Label of a single atom given an enclosure of its polynomial on a box.
BoxLabel atom_label(Relation rel, const Interval& range);

/// Three-valued classification using the natural interval extension.
BoxLabel classify_box(const Formula& f, const Box& box);

enum class Enclosure { Natural, Centered };

/// A formula compiled for repeated box classification: distinct atoms are
/// evaluated once per box, and atoms already decided on an enclosing box can
/// be passed in so that only undecided ones are re-evaluated.
class BoxClassifier {
 public:
  explicit BoxClassifier(const Formula& f, Enclosure enclosure = Enclosure::Centered);

  std::size_t atom_count() const { return atoms_.size(); }
  int variable_count() const { return k_; }

  BoxLabel classify(const Box& box) const;
  /// `state` holds one label per atom; UNKNOWN entries are recomputed on this
  /// box and updated in place. Decided entries stay valid on sub-boxes.
  BoxLabel classify(const Box& box, std::vector<BoxLabel>& state) const;
  /// Label of the formula from per-atom labels alone.
  BoxLabel combine(const std::vector<BoxLabel>& state) const;

  /// Prepares classification of cell ranges of a uniform grid over `root`.
  void bind_grid(const Box& root, std::int64_t resolution);
  /// Label of the cells lo..hi-1 (every axis) of the bound grid, from
  /// integer Taylor forms; `state` as in classify.
  BoxLabel classify_cells(const CellIndex& lo, const CellIndex& hi, std::vector<BoxLabel>& state) const;

 private:
  struct Op {
    Formula::Kind kind;
    int atom = -1;
    std::vector<int> children;
  };
  struct Region {
    const Box* box = nullptr;
    const CellIndex* lo = nullptr;
    const CellIndex* hi = nullptr;
  };
  int compile(const Formula& f);
  // Atoms still UNKNOWN in `state` are evaluated on the region only when reached.
  BoxLabel eval(int op, std::vector<BoxLabel>& state, const Region* region,
                std::vector<std::optional<Interval>>* ranges) const;

  // Atoms sharing a non-constant part reuse one enclosure per box.
  struct CompiledAtom {
    int base;
    Rational offset;
    Relation rel;
  };

  int k_;
  Enclosure enclosure_;
  std::vector<MultiPoly> bases_;
  std::vector<GridPoly> grid_bases_;
  std::vector<CompiledAtom> atoms_;
  std::vector<Op> ops_;
  int root_ = 0;
};

}  // namespace sabetti
