#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabetti/adaptive.hpp"
#include "sabetti/formula.hpp"
#include "sabetti/gv_closure.hpp"

namespace sabetti {

/// x_i in [lo_i, hi_i] for every axis, as 2k linear atoms.
Formula box_formula(const Box& box);

/// Conjunction of P = 0 for zeros, P >= eps_{2j} for +1 and P <= -eps_{2j}
/// for -1, j = level. At level 0 there is no eps_0; the signs become P >= 0
/// and P <= 0 and a note is appended to `notes` when given.
Formula sigma_minus(const SignCondition& sigma, const EpsilonSchedule& eps, std::vector<std::string>* notes = nullptr);

/// S and |P| <= eps_{2j-1} for zeros, P >= eps_{2j} for +1, P <= -eps_{2j}
/// for -1. At level 0 this is sigma_minus and S.
Formula sigma_minus_plus(const SignCondition& sigma, const EpsilonSchedule& eps, const Formula& s_formula);

enum class Certificate { CONVEX_CELL, ORACLE_CHECKED, USER_ASSERTED };
enum class CoverBackend { SIGN_THICKENING, GRID_CELLS, USER };

const char* to_string(Certificate c);
const char* to_string(CoverBackend b);
Certificate certificate_from_string(const std::string& s);
CoverBackend backend_from_string(const std::string& s);

struct CoverSet {
  /// The piece as a formula: region restricted to cell.
  Formula formula;
  Certificate certificate = Certificate::USER_ASSERTED;
  std::optional<Point> witness;
  /// Homology of the piece's raster when the certificate is ORACLE_CHECKED.
  std::optional<BettiNumbers> oracle;
  /// Raster realization: the leaves of `region` lying in the closed `cell`
  /// (the whole bounding box when absent).
  Formula region;
  std::optional<Box> cell;
  std::vector<std::string> notes;
};

struct CoverReport {
  /// Boxes classified INSIDE the ambient set with no piece INSIDE on them.
  std::vector<Box> uncovered;
  /// Per piece: boxes where the piece is INSIDE and the ambient set OUTSIDE.
  std::vector<std::vector<Box>> outside_ambient;
  bool pass() const;
};

struct Cover {
  Formula ambient;
  Box box;
  std::vector<CoverSet> pieces;
  /// Which raster leaves pieces keep: INSIDE only, or INSIDE and UNKNOWN.
  RasterMode mode = RasterMode::OUTER;
  /// Depth of the raster used to certify the pieces.
  int depth = 0;
  std::optional<CoverReport> verification;
  std::vector<std::string> warnings;
};

struct CoverOptions {
  CoverBackend backend = CoverBackend::GRID_CELLS;
  int depth = 8;
  /// Initial block level of GRID_CELLS (2^level blocks per axis).
  int block_level = 2;
  RasterMode mode = RasterMode::OUTER;
  /// Bounding box of S; inferred from the formula when absent.
  std::optional<Box> box;
  /// Pieces for the USER backend.
  std::vector<Formula> user_pieces;
  /// Resolution of the union check; 0 means 2^depth.
  int verify_resolution = 0;
};

/// The leaves of every piece on one shared raster.
struct PieceRaster {
  std::shared_ptr<const DyadicRaster> raster;
  std::vector<std::vector<int>> piece_leaves;
};

/// Rasterizes all pieces on a shared raster of the given depth.
PieceRaster rasterize_cover(const Cover& cover, int depth);

Cover build_cover(const Formula& s_formula, const std::vector<MultiPoly>& family, const EpsilonSchedule& eps,
                  CoverBackend backend);
Cover build_cover(const Formula& s_formula, const std::vector<MultiPoly>& family, const EpsilonSchedule& eps,
                  const CoverOptions& options);

/// Subdivides the bounding box down to `resolution` cells per axis and checks
/// that every box INSIDE the ambient set has a piece INSIDE on it, and that
/// no piece is INSIDE where the ambient set is OUTSIDE. Boxes are refined
/// only where the answer is not yet settled, which gives the same verdict as
/// checking every cell of the uniform grid.
CoverReport verify_cover(const Cover& cover, int resolution);

nlohmann::json cover_to_json(const Cover& cover);
/// Reads {"ambient", "pieces": [{"formula", "certificate", "witness"}]}; an
/// optional "box" gives the bounding box.
Cover cover_from_json(const nlohmann::json& j, int variable_count);

}  // namespace sabetti
