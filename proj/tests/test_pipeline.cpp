#include <doctest.h>

#include "sabetti/pipeline.hpp"

using namespace sabetti;

namespace {
Formula f2(const char* s) { return parse_formula(s, 2); }
}  // namespace

TEST_CASE("closed disk and annulus") {
  PipelineConfig cfg;
  const BettiReport disk = betti1_general(f2("(<=0 (+ (^ x1 2) (^ x2 2) -1))"), cfg);
  CHECK(disk.converged);
  CHECK(disk.b0 == 1);
  CHECK(disk.b1 == 0);
  cfg.oracle_check = true;
  const BettiReport annulus =
      betti1_general(f2("(and (>=0 (+ (^ x1 2) (^ x2 2) -1)) (<=0 (+ (^ x1 2) (^ x2 2) -4)))"), cfg);
  CHECK(annulus.converged);
  CHECK(annulus.b0 == 1);
  CHECK(annulus.b1 == 1);
  REQUIRE(annulus.oracle);
  CHECK(annulus.oracle->agrees);
}

TEST_CASE("open disk goes through the closed replacement") {
  const BettiReport r = betti1_general(f2("(<0 (+ (^ x1 2) (^ x2 2) -1))"), PipelineConfig{});
  CHECK(r.converged);
  CHECK(r.b0 == 1);
  CHECK(r.b1 == 0);
  CHECK(r.metadata.at("route") == "general");
}

TEST_CASE("empty set") {
  const BettiReport r = betti1_general(f2("(<0 (+ (^ x1 2) (^ x2 2) 1))"), PipelineConfig{});
  CHECK(r.converged);
  CHECK(r.b0 == 0);
  CHECK(r.b1 == 0);
}

TEST_CASE("report_result drops metadata") {
  BettiReport r;
  r.b0 = 2;
  r.metadata["seconds"] = 1.5;
  const nlohmann::json j = report_result(r.to_json());
  CHECK(j.at("b0") == 2);
  CHECK_FALSE(j.contains("metadata"));
}

TEST_CASE("components of two disks carry samples in the set") {
  const Formula f = f2("(or (<=0 (+ (^ (+ x1 2) 2) (^ x2 2) -1)) (<=0 (+ (^ (- x1 2) 2) (^ x2 2) -1)))");
  const ComponentsReport c = components(f, PipelineConfig{});
  CHECK(c.converged);
  CHECK(c.count == 2);
  for (const auto& s : c.components) {
    CHECK(s.in_set);
    CHECK(f.holds_at(s.point));
  }
}

TEST_CASE("components of a circle agree with the curve route") {
  const ComponentsReport c = components(f2("(=0 (+ (^ x1 2) (^ x2 2) -1))"), PipelineConfig{});
  CHECK(c.count == 1);
  REQUIRE(c.curve_count);
  CHECK(*c.curve_count == 1);
}

TEST_CASE("closed replacement lists the conditions in the set") {
  const Formula f = f2("(<0 (+ (^ x1 2) (^ x2 2) -1))");
  const ClosedReplacement r = closed_replacement(f, cube(2, 2), Rational(1, 2));
  REQUIRE(r.formula);
  CHECK(is_p_closed(*r.formula));
  REQUIRE(r.sigma.size() == 1);
  CHECK(r.sigma[0].signs == std::vector<int>{-1});
  CHECK(r.realizable.size() == 3);
}

TEST_CASE("invalid configurations are rejected") {
  PipelineConfig cfg;
  cfg.eta = Rational(3, 2);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = PipelineConfig{};
  cfg.max_doublings = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
