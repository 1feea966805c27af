#include "sabetti/gv_closure.hpp"

#include <algorithm>
#include <map>

#include "sabetti/error.hpp"

namespace sabetti {

EpsilonSchedule::EpsilonSchedule(Rational base, int count, Rational scale)
    : base_(std::move(base)), scale_(std::move(scale)), count_(count) {
  if (!(Rational(0) < base_ && base_ < Rational(1))) {
    throw Error(ErrorKind::InvalidArgument, "schedule base must lie in (0,1)");
  }
  if (!(Rational(0) < scale_ && scale_ <= Rational(1))) {
    throw Error(ErrorKind::InvalidArgument, "schedule scale must lie in (0,1]");
  }
  if (count_ < 0) throw Error(ErrorKind::InvalidArgument, "schedule count must be non-negative");
}

Rational EpsilonSchedule::value(int i) const {
  if (i < 1 || i > count_) {
    throw Error(ErrorKind::ScheduleTooShort,
                "eps_" + std::to_string(i) + " requested from a schedule of length " + std::to_string(count_));
  }
  return scale_ * pow(base_, static_cast<unsigned>(count_ + 1 - i));
}

nlohmann::json EpsilonSchedule::to_json() const {
  nlohmann::json j{{"base", base_.str()}, {"count", count_}};
  if (scale_ != Rational(1)) j["scale"] = scale_.str();
  return j;
}

EpsilonSchedule EpsilonSchedule::from_json(const nlohmann::json& j) {
  const Rational scale = j.contains("scale") ? Rational::parse(j.at("scale").get<std::string>()) : Rational(1);
  return EpsilonSchedule(Rational::parse(j.at("base").get<std::string>()), j.at("count").get<int>(), scale);
}

int level(const SignCondition& sigma) {
  return static_cast<int>(std::count(sigma.signs.begin(), sigma.signs.end(), 0));
}

namespace {

int arity(const SignCondition& sigma, const Formula& s) {
  return sigma.family.empty() ? s.variable_count() : sigma.family.front().variable_count();
}

Formula shifted(const MultiPoly& p, const Rational& c, Relation rel) {
  return Formula::atom(p + MultiPoly::constant(p.variable_count(), c), rel);
}

// The thickened sign conditions without S: zeros become |P| <= e (closed) or
// |P| < e (open); nonzero signs become weak or strict sign atoms.
std::vector<Formula> thickened(const SignCondition& sigma, const Rational& e, bool open) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < sigma.family.size(); ++i) {
    const MultiPoly& p = sigma.family[i];
    const int s = sigma.signs[i];
    if (s == 0) {
      parts.push_back(shifted(p, e, open ? Relation::GT : Relation::GE));
      parts.push_back(shifted(p, -e, open ? Relation::LT : Relation::LE));
    } else if (s > 0) {
      parts.push_back(Formula::atom(p, open ? Relation::GT : Relation::GE));
    } else {
      parts.push_back(Formula::atom(p, open ? Relation::LT : Relation::LE));
    }
  }
  return parts;
}

Rational closed_width(const SignCondition& sigma, const EpsilonSchedule& eps) {
  const int m = level(sigma);
  return m == 0 ? Rational(0) : eps.value(2 * m);
}

Rational open_width(const SignCondition& sigma, const EpsilonSchedule& eps) {
  const int m = level(sigma);
  return m == 0 ? Rational(0) : eps.value(2 * m - 1);
}

// Points of S outside the open thickening of tau, as a closed formula.
Formula open_complement(const SignCondition& tau, const EpsilonSchedule& eps) {
  const Rational e = open_width(tau, eps);
  std::vector<Formula> alts;
  for (std::size_t i = 0; i < tau.family.size(); ++i) {
    const MultiPoly& p = tau.family[i];
    const int s = tau.signs[i];
    if (s == 0) {
      alts.push_back(shifted(p, e, Relation::LE));
      alts.push_back(shifted(p, -e, Relation::GE));
    } else if (s > 0) {
      alts.push_back(Formula::atom(p, Relation::LE));
    } else {
      alts.push_back(Formula::atom(p, Relation::GE));
    }
  }
  return disjunction(std::move(alts), tau.family.empty() ? 0 : tau.family.front().variable_count());
}

}  // namespace

Formula sigma_plus_closed(const SignCondition& sigma, const EpsilonSchedule& eps, const Formula& s_formula) {
  std::vector<Formula> parts{s_formula};
  for (auto& f : thickened(sigma, closed_width(sigma, eps), false)) parts.push_back(std::move(f));
  return conjunction(std::move(parts), arity(sigma, s_formula));
}

Formula sigma_plus_open(const SignCondition& sigma, const EpsilonSchedule& eps, const Formula& s_formula) {
  std::vector<Formula> parts{s_formula};
  for (auto& f : thickened(sigma, open_width(sigma, eps), true)) parts.push_back(std::move(f));
  return conjunction(std::move(parts), arity(sigma, s_formula));
}

Formula gv_replace(const std::vector<MultiPoly>& family, const std::vector<SignCondition>& Sigma,
                   const Formula& s_formula, const EpsilonSchedule& eps,
                   const std::vector<SignCondition>& realizable) {
  const int k = s_formula.variable_count();
  int top = 0;
  for (const auto& tau : realizable) top = std::max(top, level(tau));
  if (2 * top > eps.count()) {
    throw Error(ErrorKind::ScheduleTooShort, "schedule must provide 2 values per realized level");
  }
  for (const auto& s : Sigma) {
    if (s.family != family) throw Error(ErrorKind::InvalidArgument, "sign condition over a different family");
    if (std::find(realizable.begin(), realizable.end(), s) == realizable.end()) {
      throw Error(ErrorKind::NotInSet, "a sign condition of Sigma is not realized in S");
    }
  }
  // x is in X^{t+1} iff for some sigma in Sigma it lies in the closed
  // thickening of sigma and avoids the open thickening of every non-selected
  // condition whose level is at least level(sigma). The X^0 term is absorbed
  // because each realization lies in its own closed thickening.
  std::map<int, std::vector<Formula>> removed_at;
  for (const auto& tau : realizable) {
    if (std::find(Sigma.begin(), Sigma.end(), tau) != Sigma.end()) continue;
    removed_at[level(tau)].push_back(open_complement(tau, eps));
  }
  std::vector<Formula> pieces;
  for (const auto& sigma : Sigma) {
    std::vector<Formula> parts{s_formula};
    for (auto& f : thickened(sigma, closed_width(sigma, eps), false)) parts.push_back(std::move(f));
    for (const auto& [m, keep] : removed_at) {
      if (m < level(sigma)) continue;
      parts.insert(parts.end(), keep.begin(), keep.end());
    }
    pieces.push_back(conjunction(std::move(parts), k));
  }
  return disjunction(std::move(pieces), k);
}

Formula gv_replace(const std::vector<MultiPoly>& family, const std::vector<SignCondition>& Sigma,
                   const Formula& s_formula, const EpsilonSchedule& eps) {
  return gv_replace(family, Sigma, s_formula, eps, enumerate_sign_conditions(family, s_formula, 32));
}

namespace {

// Upper bound of sqrt(x) for x >= 0, as a rational with small denominator.
Rational sqrt_upper(const Rational& x) {
  Rational r(1);
  while (r * r < x) r *= Rational(2);
  return r;
}

void bounds_from_atom(const Atom& a, int k, std::vector<std::optional<Rational>>& lo,
                      std::vector<std::optional<Rational>>& hi) {
  const MultiPoly& p = a.poly;
  // Normalize to q <= 0.
  MultiPoly q = p;
  if (a.rel == Relation::GE || a.rel == Relation::GT) q = -p;
  else if (a.rel != Relation::LE && a.rel != Relation::LT && a.rel != Relation::EQ) return;
  auto bound = [&](const MultiPoly& poly) {
    const Rational c = poly.constant_term();
    int var = -1;
    int power = 0;
    Rational coef;
    std::vector<Rational> quad(static_cast<std::size_t>(k));
    bool linear_single = true, diagonal_quadratic = true;
    for (const auto& t : poly.terms()) {
      int deg = 0, v = -1, nv = 0;
      for (int i = 0; i < k; ++i) {
        if (t.exps[static_cast<std::size_t>(i)] != 0) {
          deg += t.exps[static_cast<std::size_t>(i)];
          v = i;
          ++nv;
        }
      }
      if (deg == 0) continue;
      if (nv != 1) {
        linear_single = diagonal_quadratic = false;
        break;
      }
      if (deg == 1) {
        diagonal_quadratic = false;
        if (var >= 0 && var != v) linear_single = false;
        var = v;
        power = 1;
        coef = t.coef;
      } else if (deg == 2) {
        linear_single = false;
        quad[static_cast<std::size_t>(v)] = t.coef;
      } else {
        linear_single = diagonal_quadratic = false;
      }
    }
    if (linear_single && power == 1) {
      // coef * x + c <= 0.
      const Rational b = -c / coef;
      auto& slot = coef.sign() > 0 ? hi[static_cast<std::size_t>(var)] : lo[static_cast<std::size_t>(var)];
      if (coef.sign() > 0) slot = slot ? min(*slot, b) : b;
      else slot = slot ? max(*slot, b) : b;
      return;
    }
    if (diagonal_quadratic && c.sign() <= 0) {
      for (int i = 0; i < k; ++i) {
        if (quad[static_cast<std::size_t>(i)].sign() <= 0) return;
      }
      for (int i = 0; i < k; ++i) {
        const Rational r = sqrt_upper(-c / quad[static_cast<std::size_t>(i)]);
        auto& h = hi[static_cast<std::size_t>(i)];
        auto& l = lo[static_cast<std::size_t>(i)];
        h = h ? min(*h, r) : r;
        l = l ? max(*l, -r) : -r;
      }
    }
  };
  bound(q);
  if (a.rel == Relation::EQ) bound(-p);
}

}  // namespace

std::optional<Box> infer_bounding_box(const Formula& s_formula) {
  const int k = s_formula.variable_count();
  std::vector<std::optional<Rational>> lo(static_cast<std::size_t>(k)), hi(static_cast<std::size_t>(k));
  std::vector<Formula> conjuncts;
  if (s_formula.kind() == Formula::Kind::And) conjuncts = s_formula.children();
  else conjuncts.push_back(s_formula);
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    const Formula& c = conjuncts[i];
    if (c.kind() == Formula::Kind::And) {
      conjuncts.insert(conjuncts.end(), c.children().begin(), c.children().end());
    } else if (c.kind() == Formula::Kind::Atom) {
      bounds_from_atom(c.atom(), k, lo, hi);
    }
  }
  Box box;
  for (int i = 0; i < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (!lo[u] || !hi[u] || *hi[u] < *lo[u]) return std::nullopt;
    box.emplace_back(*lo[u], *hi[u]);
  }
  return box;
}

std::vector<WitnessedSign> enumerate_sign_conditions_witnessed(const std::vector<MultiPoly>& family,
                                                               const Formula& s_formula, int resolution,
                                                               const std::optional<Box>& box) {
  const int k = s_formula.variable_count();
  const std::optional<Box> b = box ? box : infer_bounding_box(s_formula);
  if (!b) throw Error(ErrorKind::UnboundedSet, "no bounding box given and none can be inferred");
  if (static_cast<int>(b->size()) != k) throw Error(ErrorKind::DimensionMismatch, "box dimension differs");
  if (resolution < 1) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  std::map<std::vector<int>, Point> found;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  std::vector<std::vector<Rational>> lines(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) {
    const Interval& iv = (*b)[static_cast<std::size_t>(a)];
    for (int i = 0; i <= resolution; ++i) {
      lines[static_cast<std::size_t>(a)].push_back(iv.lo() + iv.width() * Rational(i) / Rational(resolution));
    }
  }
  Point p(static_cast<std::size_t>(k));
  while (true) {
    for (int a = 0; a < k; ++a) p[static_cast<std::size_t>(a)] = lines[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    if (s_formula.holds_at(p)) {
      const SignCondition s = sign_condition_at(family, p);
      found.emplace(s.signs, p);
    }
    int a = 0;
    for (; a < k; ++a) {
      if (++idx[static_cast<std::size_t>(a)] <= resolution) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
    if (a == k) break;
  }
  std::vector<WitnessedSign> out;
  for (auto& [signs, w] : found) out.push_back(WitnessedSign{SignCondition{family, signs}, w});
  return out;
}

std::vector<SignCondition> enumerate_sign_conditions(const std::vector<MultiPoly>& family, const Formula& s_formula,
                                                     int resolution, const std::optional<Box>& box) {
  std::vector<SignCondition> out;
  for (auto& w : enumerate_sign_conditions_witnessed(family, s_formula, resolution, box)) {
    out.push_back(std::move(w.sigma));
  }
  return out;
}

MultiPoly perturbation_polynomial(int variable_count, int index, int dprime) {
  MultiPoly h = MultiPoly::constant(variable_count, 1);
  for (int j = 1; j <= variable_count; ++j) {
    Exponents e(static_cast<std::size_t>(variable_count), 0);
    e[static_cast<std::size_t>(j - 1)] = dprime;
    h += MultiPoly::monomial(variable_count, pow(Rational(index), static_cast<unsigned>(j)), std::move(e));
  }
  return h;
}

int perturbation_degree(const Formula& f) {
  int dmax = 0;
  for (const auto& p : f.atom_polynomials()) dmax = std::max(dmax, p.degree());
  return dmax % 2 == 0 ? dmax + 2 : dmax + 1;
}

Formula star_perturbation(const Formula& f, const Rational& delta) {
  if (!is_p_closed(f)) throw Error(ErrorKind::NotPClosed, "star perturbation needs a negation-free closed formula");
  if (delta.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  const int k = f.variable_count();
  const std::vector<MultiPoly> polys = f.atom_polynomials();
  const int dprime = perturbation_degree(f);
  return f.map_atoms([&](const Atom& a) {
    const auto i = static_cast<int>(std::find(polys.begin(), polys.end(), a.poly) - polys.begin()) + 1;
    const MultiPoly dh = delta * perturbation_polynomial(k, i, dprime);
    switch (a.rel) {
      case Relation::GE: return Formula::atom(a.poly + dh, Relation::GE);
      case Relation::LE: return Formula::atom(a.poly - dh, Relation::LE);
      default:
        return Formula::make_and({Formula::atom(a.poly + dh, Relation::GE), Formula::atom(a.poly - dh, Relation::LE)});
    }
  });
}

}  // namespace sabetti
