#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "sabetti/formula.hpp"

namespace sabetti {

/// Concrete values for the infinitesimals eps_1 << ... << eps_count:
/// eps_i = scale * base^(count + 1 - i).
class EpsilonSchedule {
 public:
  EpsilonSchedule(Rational base, int count, Rational scale = 1);

  const Rational& base() const { return base_; }
  const Rational& scale() const { return scale_; }
  int count() const { return count_; }
  /// eps_i for 1 <= i <= count.
  Rational value(int i) const;
  Rational smallest() const { return value(1); }

  nlohmann::json to_json() const;
  static EpsilonSchedule from_json(const nlohmann::json& j);

 private:
  Rational base_;
  Rational scale_;
  int count_;
};

/// Number of zero entries.
int level(const SignCondition& sigma);

/// S and |P| <= eps_{2m} for zeros, P >= 0 for +1, P <= 0 for -1 (m = level).
Formula sigma_plus_closed(const SignCondition& sigma, const EpsilonSchedule& eps, const Formula& s_formula);
/// S and |P| < eps_{2m-1} for zeros, P > 0 for +1, P < 0 for -1.
Formula sigma_plus_open(const SignCondition& sigma, const EpsilonSchedule& eps, const Formula& s_formula);

/// Closed formula for the replacement X' of X = union of the realizations of
/// Sigma inside S. `realizable` lists the sign conditions realized in S
/// (Sigma must be a subset); every element outside Sigma is subtracted at its
/// level with the open thickening, written in closed form via De Morgan.
/// Only eps_1 .. eps_{2L} are read, L the highest level in `realizable`.
Formula gv_replace(const std::vector<MultiPoly>& family, const std::vector<SignCondition>& Sigma,
                   const Formula& s_formula, const EpsilonSchedule& eps,
                   const std::vector<SignCondition>& realizable);
/// As above, with the realizable conditions enumerated on S at resolution 32.
Formula gv_replace(const std::vector<MultiPoly>& family, const std::vector<SignCondition>& Sigma,
                   const Formula& s_formula, const EpsilonSchedule& eps);

struct WitnessedSign {
  SignCondition sigma;
  Point witness;
};

/// Bounding box read off a conjunction of coordinate bounds or of an atom
/// sum_i a_i x_i^2 + c <= 0 with all a_i > 0. Empty if none is found.
std::optional<Box> infer_bounding_box(const Formula& s_formula);

/// Sign conditions realized at vertices of the grid of `resolution` cells per
/// axis over the bounding box, at points satisfying S. Sampling can miss
/// conditions realized only off the lattice.
std::vector<WitnessedSign> enumerate_sign_conditions_witnessed(const std::vector<MultiPoly>& family,
                                                               const Formula& s_formula, int resolution,
                                                               const std::optional<Box>& box = std::nullopt);
std::vector<SignCondition> enumerate_sign_conditions(const std::vector<MultiPoly>& family, const Formula& s_formula,
                                                     int resolution, const std::optional<Box>& box = std::nullopt);

/// H_i = 1 + sum_j i^j x_j^{d'} with j 1-based.
MultiPoly perturbation_polynomial(int variable_count, int index, int dprime);

/// Smallest even integer above every atom degree, so that H_i > 0 everywhere.
int perturbation_degree(const Formula& f);

/// Replaces P >= 0 by P + delta H_i >= 0, P <= 0 by P - delta H_i <= 0, and
/// P = 0 by both, where i is the 1-based position of P among the distinct
/// atom polynomials and d' = perturbation_degree(f).
Formula star_perturbation(const Formula& f, const Rational& delta);

}  // namespace sabetti
