#include "sabetti/formula.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "sabetti/error.hpp"

namespace sabetti {

const char* to_string(Relation r) {
  switch (r) {
    case Relation::EQ: return "=0";
    case Relation::GT: return ">0";
    case Relation::LT: return "<0";
    case Relation::GE: return ">=0";
    case Relation::LE: return "<=0";
  }
  return "?";
}

bool satisfies(Relation r, int s) {
  switch (r) {
    case Relation::EQ: return s == 0;
    case Relation::GT: return s > 0;
    case Relation::LT: return s < 0;
    case Relation::GE: return s >= 0;
    case Relation::LE: return s <= 0;
  }
  return false;
}

const char* to_string(BoxLabel b) {
  switch (b) {
    case BoxLabel::INSIDE: return "INSIDE";
    case BoxLabel::OUTSIDE: return "OUTSIDE";
    case BoxLabel::UNKNOWN: return "UNKNOWN";
  }
  return "?";
}

Formula Formula::truth(int variable_count) {
  return Formula(std::make_shared<const Node>(Node{Kind::True, variable_count, {}, {}}));
}

Formula Formula::falsity(int variable_count) {
  return Formula(std::make_shared<const Node>(Node{Kind::False, variable_count, {}, {}}));
}

Formula Formula::atom(MultiPoly poly, Relation rel) {
  const int k = poly.variable_count();
  if (poly.is_constant()) {
    return satisfies(rel, poly.constant_term().sign()) ? truth(k) : falsity(k);
  }
  return Formula(std::make_shared<const Node>(Node{Kind::Atom, k, Atom{std::move(poly), rel}, {}}));
}

namespace {

int common_arity(const std::vector<Formula>& children) {
  if (children.empty()) throw Error(ErrorKind::InvalidArgument, "connective needs at least one argument");
  const int k = children.front().variable_count();
  for (const auto& c : children) {
    if (c.variable_count() != k) throw Error(ErrorKind::DimensionMismatch, "mixed variable counts in formula");
  }
  return k;
}

}  // namespace

Formula Formula::make_and(std::vector<Formula> children) {
  const int k = common_arity(children);
  return Formula(std::make_shared<const Node>(Node{Kind::And, k, {}, std::move(children)}));
}

Formula Formula::make_or(std::vector<Formula> children) {
  const int k = common_arity(children);
  return Formula(std::make_shared<const Node>(Node{Kind::Or, k, {}, std::move(children)}));
}

Formula Formula::make_not(Formula child) {
  const int k = child.variable_count();
  return Formula(std::make_shared<const Node>(Node{Kind::Not, k, {}, {std::move(child)}}));
}

Formula conjunction(std::vector<Formula> children, int variable_count) {
  if (children.empty()) return Formula::truth(variable_count);
  if (children.size() == 1) return children.front();
  return Formula::make_and(std::move(children));
}

Formula disjunction(std::vector<Formula> children, int variable_count) {
  if (children.empty()) return Formula::falsity(variable_count);
  if (children.size() == 1) return children.front();
  return Formula::make_or(std::move(children));
}

bool Formula::holds_at(const Point& point) const {
  switch (kind()) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: return satisfies(atom().rel, atom().poly(point).sign());
    case Kind::And:
      return std::all_of(children().begin(), children().end(), [&](const Formula& c) { return c.holds_at(point); });
    case Kind::Or:
      return std::any_of(children().begin(), children().end(), [&](const Formula& c) { return c.holds_at(point); });
    case Kind::Not: return !children().front().holds_at(point);
  }
  return false;
}

std::vector<Atom> Formula::atoms() const {
  std::vector<Atom> out;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.kind() == Kind::Atom) out.push_back(f.atom());
    for (const auto& c : f.children()) walk(c);
  };
  walk(*this);
  return out;
}

std::vector<MultiPoly> Formula::atom_polynomials() const {
  std::vector<MultiPoly> out;
  for (auto& a : atoms()) {
    if (std::find(out.begin(), out.end(), a.poly) == out.end()) out.push_back(std::move(a.poly));
  }
  return out;
}

Formula Formula::map_atoms(const std::function<Formula(const Atom&)>& fn) const {
  switch (kind()) {
    case Kind::True:
    case Kind::False: return *this;
    case Kind::Atom: return fn(atom());
    case Kind::Not: return make_not(children().front().map_atoms(fn));
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> mapped;
      mapped.reserve(children().size());
      for (const auto& c : children()) mapped.push_back(c.map_atoms(fn));
      return kind() == Kind::And ? make_and(std::move(mapped)) : make_or(std::move(mapped));
    }
  }
  return *this;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.variable_count() != b.variable_count()) return false;
  if (a.kind() == Formula::Kind::Atom) return a.atom() == b.atom();
  return a.children() == b.children();
}

namespace {

std::string term_to_sexpr(const Term& t) {
  std::vector<std::string> factors;
  bool has_var = std::any_of(t.exps.begin(), t.exps.end(), [](int e) { return e != 0; });
  if (!has_var || t.coef != Rational(1)) factors.push_back(t.coef.str());
  for (std::size_t i = 0; i < t.exps.size(); ++i) {
    if (t.exps[i] == 0) continue;
    const std::string v = "x" + std::to_string(i + 1);
    factors.push_back(t.exps[i] == 1 ? v : "(^ " + v + " " + std::to_string(t.exps[i]) + ")");
  }
  if (factors.size() == 1) return factors.front();
  std::string s = "(*";
  for (const auto& f : factors) s += " " + f;
  return s + ")";
}

}  // namespace

std::string poly_to_sexpr(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  if (p.terms().size() == 1) return term_to_sexpr(p.terms().front());
  std::string s = "(+";
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) s += " " + term_to_sexpr(*it);
  return s + ")";
}

std::string Formula::str() const {
  switch (kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: return std::string("(") + to_string(atom().rel) + " " + poly_to_sexpr(atom().poly) + ")";
    case Kind::Not: return "(not " + children().front().str() + ")";
    case Kind::And:
    case Kind::Or: {
      std::string s = kind() == Kind::And ? "(and" : "(or";
      for (const auto& c : children()) s += " " + c.str();
      return s + ")";
    }
  }
  return "";
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int k) : text_(text), k_(k) {}

  Formula formula_top() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

  MultiPoly poly_top() {
    MultiPoly p = poly();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(pos_, what + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_open() {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == '(';
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string symbol() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected a symbol");
    return std::string(text_.substr(start, pos_ - start));
  }

  Formula formula() {
    if (!at_open()) {
      const std::size_t start = pos_;
      const std::string s = symbol();
      if (s == "true") return Formula::truth(k_);
      if (s == "false") return Formula::falsity(k_);
      pos_ = start;
      fail("expected a formula");
    }
    expect('(');
    const std::size_t head_pos = pos_;
    const std::string head = symbol();
    if (head == "and" || head == "or") {
      std::vector<Formula> children;
      while (!closing()) children.push_back(formula());
      if (children.empty()) {
        pos_ = head_pos;
        fail("empty '" + head + "'");
      }
      expect(')');
      return head == "and" ? Formula::make_and(std::move(children)) : Formula::make_or(std::move(children));
    }
    if (head == "not") {
      Formula c = formula();
      expect(')');
      return Formula::make_not(std::move(c));
    }
    static const std::map<std::string, Relation> rels = {
        {"=0", Relation::EQ}, {">0", Relation::GT}, {"<0", Relation::LT}, {">=0", Relation::GE}, {"<=0", Relation::LE}};
    const auto it = rels.find(head);
    if (it == rels.end()) {
      pos_ = head_pos;
      fail("unknown connective or relation '" + head + "'");
    }
    MultiPoly p = poly();
    expect(')');
    return Formula::atom(std::move(p), it->second);
  }

  bool closing() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    return text_[pos_] == ')';
  }

  MultiPoly poly() {
    if (!at_open()) return term();
    expect('(');
    const std::size_t head_pos = pos_;
    const std::string head = symbol();
    if (head == "+" || head == "*") {
      std::vector<MultiPoly> args;
      while (!closing()) args.push_back(poly());
      if (args.empty()) {
        pos_ = head_pos;
        fail("empty '" + head + "'");
      }
      expect(')');
      MultiPoly acc = args.front();
      for (std::size_t i = 1; i < args.size(); ++i) acc = head == "+" ? acc + args[i] : acc * args[i];
      return acc;
    }
    if (head == "-") {
      MultiPoly a = poly();
      MultiPoly b = poly();
      expect(')');
      return a - b;
    }
    if (head == "^") {
      MultiPoly a = poly();
      skip_ws();
      const std::size_t exp_pos = pos_;
      const std::string e = symbol();
      if (e.empty() || !std::all_of(e.begin(), e.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        pos_ = exp_pos;
        fail("exponent must be an unsigned integer");
      }
      expect(')');
      return pow(a, static_cast<unsigned>(std::stoul(e)));
    }
    pos_ = head_pos;
    fail("unknown polynomial operator '" + head + "'");
  }

  MultiPoly term() {
    skip_ws();
    const std::size_t start = pos_;
    const std::string s = symbol();
    if (s.size() >= 2 && s[0] == 'x' &&
        std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const unsigned long idx = std::stoul(s.substr(1));
      if (idx < 1 || idx > static_cast<unsigned long>(k_)) {
        throw Error(ErrorKind::ArityError,
                    "variable " + s + " outside x1..x" + std::to_string(k_) + " at position " + std::to_string(start));
      }
      return MultiPoly::variable(k_, static_cast<int>(idx - 1));
    }
    try {
      return MultiPoly::constant(k_, Rational::parse(s));
    } catch (const Error&) {
      pos_ = start;
      fail("bad term '" + s + "'");
    }
  }

  std::string_view text_;
  int k_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, int variable_count) {
  if (variable_count < 1) throw Error(ErrorKind::InvalidArgument, "variable count must be positive");
  return Parser(text, variable_count).formula_top();
}

MultiPoly parse_poly(std::string_view text, int variable_count) {
  if (variable_count < 1) throw Error(ErrorKind::InvalidArgument, "variable count must be positive");
  return Parser(text, variable_count).poly_top();
}

nlohmann::json poly_to_json(const MultiPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) terms.push_back({{"coef", t.coef.str()}, {"exps", t.exps}});
  return terms;
}

MultiPoly poly_from_json(const nlohmann::json& j, int variable_count) {
  if (!j.is_array()) throw Error(ErrorKind::SyntaxError, "polynomial JSON must be a term list");
  std::vector<Term> terms;
  for (const auto& t : j) {
    Exponents e = t.at("exps").get<Exponents>();
    if (static_cast<int>(e.size()) != variable_count) {
      throw Error(ErrorKind::ArityError, "exponent vector length differs from variable count");
    }
    terms.push_back(Term{std::move(e), Rational::parse(t.at("coef").get<std::string>())});
  }
  return MultiPoly(variable_count, std::move(terms));
}

nlohmann::json to_json(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::True: return {{"op", "true"}, {"args", nlohmann::json::array()}};
    case Formula::Kind::False: return {{"op", "false"}, {"args", nlohmann::json::array()}};
    case Formula::Kind::Atom: return {{"op", to_string(f.atom().rel)}, {"args", {poly_to_json(f.atom().poly)}}};
    default: break;
  }
  nlohmann::json args = nlohmann::json::array();
  for (const auto& c : f.children()) args.push_back(to_json(c));
  const char* op = f.kind() == Formula::Kind::And ? "and" : (f.kind() == Formula::Kind::Or ? "or" : "not");
  return {{"op", op}, {"args", args}};
}

Formula formula_from_json(const nlohmann::json& j, int variable_count) {
  const std::string op = j.at("op").get<std::string>();
  const nlohmann::json args = j.contains("args") ? j.at("args") : nlohmann::json::array();
  if (op == "true") return Formula::truth(variable_count);
  if (op == "false") return Formula::falsity(variable_count);
  static const std::map<std::string, Relation> rels = {
      {"=0", Relation::EQ}, {">0", Relation::GT}, {"<0", Relation::LT}, {">=0", Relation::GE}, {"<=0", Relation::LE}};
  if (const auto it = rels.find(op); it != rels.end()) {
    if (args.size() != 1) throw Error(ErrorKind::SyntaxError, "atom takes one polynomial");
    return Formula::atom(poly_from_json(args[0], variable_count), it->second);
  }
  std::vector<Formula> children;
  for (const auto& a : args) children.push_back(formula_from_json(a, variable_count));
  if (op == "not") {
    if (children.size() != 1) throw Error(ErrorKind::SyntaxError, "'not' takes one argument");
    return Formula::make_not(std::move(children.front()));
  }
  if (op == "and" || op == "or") {
    if (children.empty()) throw Error(ErrorKind::SyntaxError, "empty '" + op + "'");
    return op == "and" ? Formula::make_and(std::move(children)) : Formula::make_or(std::move(children));
  }
  throw Error(ErrorKind::SyntaxError, "unknown op '" + op + "'");
}

bool is_p_closed(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Not: return false;
    case Formula::Kind::Atom: {
      const Relation r = f.atom().rel;
      return r == Relation::EQ || r == Relation::GE || r == Relation::LE;
    }
    default:
      return std::all_of(f.children().begin(), f.children().end(), [](const Formula& c) { return is_p_closed(c); });
  }
}

SignCondition sign_condition_at(const std::vector<MultiPoly>& family, const Point& point) {
  SignCondition s{family, {}};
  s.signs.reserve(family.size());
  for (const auto& p : family) {
    if (p.variable_count() != static_cast<int>(point.size())) {
      throw Error(ErrorKind::DimensionMismatch, "point dimension differs from variable count");
    }
    s.signs.push_back(p(point).sign());
  }
  return s;
}

namespace {

int family_arity(const SignCondition& sigma, const std::vector<MultiPoly>& z) {
  if (!sigma.family.empty()) return sigma.family.front().variable_count();
  if (!z.empty()) return z.front().variable_count();
  return 0;
}

}  // namespace

Formula realize(const SignCondition& sigma, const std::vector<MultiPoly>& z_family) {
  std::vector<Formula> parts;
  for (const auto& q : z_family) parts.push_back(Formula::atom(q, Relation::EQ));
  for (std::size_t i = 0; i < sigma.family.size(); ++i) {
    const int s = sigma.signs[i];
    parts.push_back(Formula::atom(sigma.family[i], s == 0 ? Relation::EQ : (s > 0 ? Relation::GT : Relation::LT)));
  }
  return conjunction(std::move(parts), family_arity(sigma, z_family));
}

Formula weak_relaxation(const SignCondition& sigma) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < sigma.family.size(); ++i) {
    const int s = sigma.signs[i];
    parts.push_back(Formula::atom(sigma.family[i], s == 0 ? Relation::EQ : (s > 0 ? Relation::GE : Relation::LE)));
  }
  return conjunction(std::move(parts), family_arity(sigma, {}));
}

BoxLabel atom_label(Relation rel, const Interval& range) {
  const int lo = range.lo().sign(), hi = range.hi().sign();
  switch (rel) {
    case Relation::GT:
      if (lo > 0) return BoxLabel::INSIDE;
      if (hi <= 0) return BoxLabel::OUTSIDE;
      break;
    case Relation::GE:
      if (lo >= 0) return BoxLabel::INSIDE;
      if (hi < 0) return BoxLabel::OUTSIDE;
      break;
    case Relation::LT:
      if (hi < 0) return BoxLabel::INSIDE;
      if (lo >= 0) return BoxLabel::OUTSIDE;
      break;
    case Relation::LE:
      if (hi <= 0) return BoxLabel::INSIDE;
      if (lo > 0) return BoxLabel::OUTSIDE;
      break;
    case Relation::EQ:
      if (lo == 0 && hi == 0) return BoxLabel::INSIDE;
      if (lo > 0 || hi < 0) return BoxLabel::OUTSIDE;
      break;
  }
  return BoxLabel::UNKNOWN;
}

namespace {

BoxLabel land(BoxLabel a, BoxLabel b) {
  if (a == BoxLabel::OUTSIDE || b == BoxLabel::OUTSIDE) return BoxLabel::OUTSIDE;
  if (a == BoxLabel::INSIDE && b == BoxLabel::INSIDE) return BoxLabel::INSIDE;
  return BoxLabel::UNKNOWN;
}

BoxLabel lor(BoxLabel a, BoxLabel b) {
  if (a == BoxLabel::INSIDE || b == BoxLabel::INSIDE) return BoxLabel::INSIDE;
  if (a == BoxLabel::OUTSIDE && b == BoxLabel::OUTSIDE) return BoxLabel::OUTSIDE;
  return BoxLabel::UNKNOWN;
}

BoxLabel lnot(BoxLabel a) {
  if (a == BoxLabel::INSIDE) return BoxLabel::OUTSIDE;
  if (a == BoxLabel::OUTSIDE) return BoxLabel::INSIDE;
  return BoxLabel::UNKNOWN;
}

}  // namespace

BoxLabel classify_box(const Formula& f, const Box& box) {
  if (static_cast<int>(box.size()) != f.variable_count()) {
    throw Error(ErrorKind::DimensionMismatch, "box dimension differs from variable count");
  }
  return BoxClassifier(f, Enclosure::Natural).classify(box);
}

BoxClassifier::BoxClassifier(const Formula& f, Enclosure enclosure)
    : k_(f.variable_count()), enclosure_(enclosure) {
  root_ = compile(f);
}

int BoxClassifier::compile(const Formula& f) {
  Op op{f.kind(), -1, {}};
  if (f.kind() == Formula::Kind::Atom) {
    const MultiPoly& p = f.atom().poly;
    const Rational c = p.constant_term();
    const MultiPoly base = p - MultiPoly::constant(k_, c);
    auto bit = std::find(bases_.begin(), bases_.end(), base);
    const int b = static_cast<int>(bit - bases_.begin());
    if (bit == bases_.end()) bases_.push_back(base);
    const auto ait = std::find_if(atoms_.begin(), atoms_.end(), [&](const CompiledAtom& a) {
      return a.base == b && a.offset == c && a.rel == f.atom().rel;
    });
    op.atom = static_cast<int>(ait - atoms_.begin());
    if (ait == atoms_.end()) atoms_.push_back(CompiledAtom{b, c, f.atom().rel});
  }
  for (const auto& c : f.children()) op.children.push_back(compile(c));
  ops_.push_back(std::move(op));
  return static_cast<int>(ops_.size()) - 1;
}

BoxLabel BoxClassifier::eval(int index, std::vector<BoxLabel>& state, const Region* region,
                             std::vector<std::optional<Interval>>* ranges) const {
  const Op& op = ops_[static_cast<std::size_t>(index)];
  switch (op.kind) {
    case Formula::Kind::True: return BoxLabel::INSIDE;
    case Formula::Kind::False: return BoxLabel::OUTSIDE;
    case Formula::Kind::Atom: {
      BoxLabel& l = state[static_cast<std::size_t>(op.atom)];
      if (l == BoxLabel::UNKNOWN && region != nullptr) {
        const CompiledAtom& a = atoms_[static_cast<std::size_t>(op.atom)];
        auto& r = (*ranges)[static_cast<std::size_t>(a.base)];
        if (!r) {
          const auto b = static_cast<std::size_t>(a.base);
          if (region->box == nullptr) {
            r = grid_bases_[b].enclosure(*region->lo, *region->hi);
          } else {
            r = enclosure_ == Enclosure::Natural ? eval_interval(bases_[b], *region->box)
                                                 : eval_interval_centered(bases_[b], *region->box);
          }
        }
        l = atom_label(a.rel, *r + Interval(a.offset));
      }
      return l;
    }
    case Formula::Kind::Not: return lnot(eval(op.children.front(), state, region, ranges));
    case Formula::Kind::And: {
      BoxLabel acc = BoxLabel::INSIDE;
      for (int c : op.children) {
        acc = land(acc, eval(c, state, region, ranges));
        if (acc == BoxLabel::OUTSIDE) break;
      }
      return acc;
    }
    case Formula::Kind::Or: {
      BoxLabel acc = BoxLabel::OUTSIDE;
      for (int c : op.children) {
        acc = lor(acc, eval(c, state, region, ranges));
        if (acc == BoxLabel::INSIDE) break;
      }
      return acc;
    }
  }
  return BoxLabel::UNKNOWN;
}

BoxLabel BoxClassifier::combine(const std::vector<BoxLabel>& state) const {
  std::vector<BoxLabel> copy = state;
  return eval(root_, copy, nullptr, nullptr);
}

BoxLabel BoxClassifier::classify(const Box& box) const {
  std::vector<BoxLabel> state(atoms_.size(), BoxLabel::UNKNOWN);
  return classify(box, state);
}

BoxLabel BoxClassifier::classify(const Box& box, std::vector<BoxLabel>& state) const {
  if (static_cast<int>(box.size()) != k_) {
    throw Error(ErrorKind::DimensionMismatch, "box dimension differs from variable count");
  }
  std::vector<std::optional<Interval>> ranges(bases_.size());
  const Region region{&box, nullptr, nullptr};
  return eval(root_, state, &region, &ranges);
}

void BoxClassifier::bind_grid(const Box& root, std::int64_t resolution) {
  if (static_cast<int>(root.size()) != k_) {
    throw Error(ErrorKind::DimensionMismatch, "box dimension differs from variable count");
  }
  grid_bases_.clear();
  for (const MultiPoly& p : bases_) grid_bases_.emplace_back(p, root, resolution);
}

BoxLabel BoxClassifier::classify_cells(const CellIndex& lo, const CellIndex& hi, std::vector<BoxLabel>& state) const {
  if (grid_bases_.size() != bases_.size()) throw Error(ErrorKind::InvalidArgument, "classifier has no bound grid");
  std::vector<std::optional<Interval>> ranges(bases_.size());
  const Region region{nullptr, &lo, &hi};
  return eval(root_, state, &region, &ranges);
}

}  // namespace sabetti
