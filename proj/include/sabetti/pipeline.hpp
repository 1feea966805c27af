#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabetti/covering.hpp"
#include "sabetti/cubical.hpp"
#include "sabetti/error.hpp"
#include "sabetti/formula.hpp"
#include "sabetti/gv_closure.hpp"

namespace sabetti {

struct PipelineConfig {
  /// Fixed bounding box; when absent the radius of the cube [-r, r]^k is
  /// doubled until two consecutive radii give the same answer.
  std::optional<Box> box;
  /// First radius when none can be read off the formula.
  Rational initial_radius = 2;
  int max_doublings = 3;
  /// Base of the epsilon schedule and of the perturbation size.
  Rational eta = Rational(1, 2);
  /// Halvings of the epsilon schedule's scale tried while the answer still
  /// changes.
  int max_scale_halvings = 3;
  /// First raster depth tried; 0 picks 5 for k = 2 and 4 for k = 3.
  int depth = 0;
  /// Last raster depth tried; 0 picks 13 for k = 2 and 7 for k = 3. Grows by
  /// one with every radius doubling.
  int max_depth = 0;
  /// Resolution of the sign-condition sampling grid.
  int sign_resolution = 32;
  CoverBackend backend = CoverBackend::GRID_CELLS;
  bool oracle_check = false;
  /// 0 means 2048 for k = 2 and 64 for k = 3.
  int oracle_max_resolution = 0;
  /// 0 silent, 1 one line per radius, 2 one line per depth (stderr).
  int verbosity = 0;

  /// Throws InvalidArgument unless all limits are positive and eta is in (0, 1).
  void validate() const;
};

struct OracleCheck {
  StableBetti oracle;
  bool agrees = false;
};

struct BettiReport {
  int b0 = 0;
  int b1 = 0;
  bool converged = false;
  std::vector<std::string> warnings;
  std::optional<OracleCheck> oracle;
  /// Parameters and intermediate data: radii, depths, cover sizes, ranks,
  /// epsilon values.
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// The report without the parameter-dependent parts.
nlohmann::json report_result(const nlohmann::json& report);

/// Errors raised inside the pipeline, carrying the report assembled so far.
class PipelineFailure : public Error {
 public:
  PipelineFailure(const Error& cause, nlohmann::json partial)
      : Error(cause.kind(), cause.message()), partial_(std::move(partial)) {}
  const nlohmann::json& partial() const { return partial_; }

 private:
  nlohmann::json partial_;
};

/// Betti numbers of a P-closed set: clip to a cube, perturb, cover and
/// combine the pieces with the Mayer-Vietoris complex. A depth is accepted
/// when the INNER and OUTER covers give the same numbers there and one level
/// deeper.
BettiReport betti1_closed(const Formula& f, const PipelineConfig& cfg);

/// Any formula: replaced by a closed bounded set of the same homotopy type
/// inside each cube, then handled as in betti1_closed.
BettiReport betti1_general(const Formula& f, const PipelineConfig& cfg);

struct ComponentSample {
  Point point;
  /// Whether the point satisfies the input formula; otherwise it lies in the
  /// closed replacement only.
  bool in_set = false;
  /// Raster leaves making up the component.
  std::vector<Box> boxes;
};

struct ComponentsReport {
  int count = 0;
  bool converged = false;
  std::vector<ComponentSample> components;
  /// Count from the plane-curve route, when it applies.
  std::optional<int> curve_count;
  std::vector<std::string> warnings;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
};

ComponentsReport components(const Formula& f, const PipelineConfig& cfg);

struct ClosedReplacement {
  /// Empty when no sampled sign condition satisfies f.
  std::optional<Formula> formula;
  std::optional<EpsilonSchedule> eps;
  std::vector<SignCondition> sigma;
  std::vector<SignCondition> realizable;
  /// Whether sign conditions came from grid sampling.
  bool sampled = false;
};

/// Closed bounded set of the homotopy type of f inside the box: the sign
/// conditions of the atoms of f are sampled on the box, those satisfying f
/// form Sigma, and the schedule is eps_i = scale * eta^(2L + 1 - i) with L the
/// highest realized level.
ClosedReplacement closed_replacement(const Formula& f, const Box& box, const Rational& eta,
                                     const Rational& scale = 1, int sign_resolution = 32);

/// eta^(2t+1) / 2^m for t distinct atoms, 2^m above every |H_i| on the box.
Rational perturbation_size(const Formula& f, const Box& box, const Rational& eta);

/// Cube [-r, r]^k.
Box cube(int variable_count, const Rational& r);

}  // namespace sabetti
