#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerf/analyzer.hpp"
#include "kerf/errors.hpp"
#include "kerf/gcode.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace kerf;

namespace {

constexpr double kPi = std::numbers::pi;

Report analyze_text(const std::string& program, const MachineLimits& m, AnalyzeOptions opts = {}) {
  const ParseResult r = parse_program(program);
  REQUIRE_FALSE(r.has_errors());
  return analyze(r.path, m, opts);
}

void require_same(const Report& a, const Report& b) {
  CHECK(a.block_count == b.block_count);
  CHECK(a.total_length == b.total_length);
  CHECK(a.cutting_length == b.cutting_length);
  CHECK(a.programmed_time == b.programmed_time);
  CHECK(a.estimated_time == b.estimated_time);
  CHECK(a.blocks == b.blocks);
  CHECK(a.junctions == b.junctions);
  CHECK(a.histograms == b.histograms);
  CHECK(a.notes == b.notes);
}

MachineLimits scaled(MachineLimits m, double k) {
  for (AxisLimits* a : {&m.x, &m.y, &m.z}) {
    a->vmax *= k;
    a->amax *= k;
    a->jmax *= k;
  }
  return m;
}

ToolPath rotate90(const ToolPath& p) {
  ToolPath out;
  auto rot = [](Point3 q) { return Point3{-q.y, q.x, q.z}; };
  for (const Block& b : p.blocks) {
    Block c = b;
    if (b.is_arc()) {
      const ArcMove& a = b.arc();
      c.shape = ArcMove{rot(a.start), rot(a.end), rot(a.center), a.plane, a.clockwise};
    } else {
      c.shape = LinearMove{rot(b.start()), rot(b.end())};
    }
    out.blocks.push_back(c);
  }
  return out;
}

ToolPath translate(const ToolPath& p, Vec3 d) {
  ToolPath out;
  for (const Block& b : p.blocks) {
    Block c = b;
    if (b.is_arc()) {
      const ArcMove& a = b.arc();
      c.shape = ArcMove{a.start + d, a.end + d, a.center + d, a.plane, a.clockwise};
    } else {
      c.shape = LinearMove{b.start() + d, b.end() + d};
    }
    out.blocks.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("severity bins") {
  CHECK(classify_severity(0) == SeverityClass::None);
  CHECK(classify_severity(9.999) == SeverityClass::None);
  CHECK(classify_severity(10) == SeverityClass::Moderate);
  CHECK(classify_severity(50) == SeverityClass::High);
  CHECK(classify_severity(90) == SeverityClass::Severe);
  CHECK(classify_severity(95) == SeverityClass::Severe);
  CHECK(classify_severity(100) == SeverityClass::Severe);
  SeverityBins custom{{5, 20, 60}};
  CHECK(classify_severity(59, custom) == SeverityClass::High);
  CHECK(classify_severity(60, custom) == SeverityClass::Severe);
}

TEST_CASE("names round-trip") {
  for (auto s : {SeverityClass::None, SeverityClass::Moderate, SeverityClass::High, SeverityClass::Severe})
    CHECK(severity_from_name(severity_name(s)) == s);
  for (auto c : {LengthClass::Critical, LengthClass::Marginal, LengthClass::Ok})
    CHECK(length_class_from_name(length_class_name(c)) == c);
  for (auto t : {JunctionType::Tangential, JunctionType::CurvatureSegmentArc, JunctionType::CurvatureArcArc})
    CHECK(junction_type_from_name(junction_type_name(t)) == t);
  CHECK_FALSE(severity_from_name("purple").has_value());
}

TEST_CASE("hexagon: six equal tangential junctions") {
  const Report r = analyze_text(testing::hexagon_program(10000), testing::illustrative_machine());
  REQUIRE(r.junctions.size() == 6);
  CHECK(r.histograms.tangential == 6);
  CHECK(r.histograms.curvature == 0);
  for (const JunctionAnalysis& j : r.junctions) {
    CHECK(j.type == JunctionType::Tangential);
    CHECK(j.beta == doctest::Approx(kPi / 3).epsilon(1e-6));
    CHECK(std::abs(j.predicted_feed - r.junctions[0].predicted_feed) <= 1e-6 * r.junctions[0].predicted_feed);
    CHECK(j.severity == r.junctions[0].severity);
  }
  // The exact-coordinate hexagon is symmetric to rounding.
  const Report exact = analyze(testing::polygon_path(6, 10, 10000.0 / 60), testing::illustrative_machine());
  REQUIRE(exact.junctions.size() == 6);
  for (const JunctionAnalysis& j : exact.junctions)
    CHECK(std::abs(j.predicted_feed - exact.junctions[0].predicted_feed) <= 1e-9 * j.predicted_feed);
}

TEST_CASE("hexagon corner feed is independent of the programmed feed") {
  const MachineLimits m = testing::illustrative_machine();
  const Report a = analyze_text(testing::hexagon_program(1000), m);
  const Report b = analyze_text(testing::hexagon_program(10000), m);
  const Report c = analyze_text(testing::hexagon_program(60000), m);
  REQUIRE(a.junctions.size() == 6);
  REQUIRE(b.junctions.size() == 6);
  REQUIRE(c.junctions.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    REQUIRE(a.junctions[i].corner.has_value());
    CHECK(a.junctions[i].corner->binding != Binding::Vmax);
    CHECK(a.junctions[i].corner->v_limit == b.junctions[i].corner->v_limit);
    CHECK(a.junctions[i].corner->v_limit == c.junctions[i].corner->v_limit);
    CHECK(a.junctions[i].predicted_feed == c.junctions[i].predicted_feed);
  }
}

TEST_CASE("spiral: segment-arc entry and three arc-arc junctions") {
  const MachineLimits m = testing::illustrative_machine();
  const Report r = analyze_text(testing::spiral_program(10000), m);
  REQUIRE(r.junctions.size() == 4);
  CHECK(r.junctions[0].type == JunctionType::CurvatureSegmentArc);
  const double jd = 30000 * 0.01;
  CHECK(std::abs(r.junctions[0].predicted_feed - std::sqrt(jd * 5)) <= 1e-9 * std::sqrt(jd * 5));
  const double radii[] = {5, 10, 15, 20};
  for (int k = 0; k < 3; ++k) {
    const JunctionAnalysis& j = r.junctions[k + 1];
    CHECK(j.type == JunctionType::CurvatureArcArc);
    CHECK(j.r_before == doctest::Approx(radii[k]));
    CHECK(j.r_after == doctest::Approx(radii[k + 1]));
    CHECK_FALSE(j.opposite_turning);
    const double r1 = radii[k], r2 = radii[k + 1];
    const double want = std::sqrt(r1 * r2 * jd / std::abs(r1 - r2));
    CHECK(std::abs(j.predicted_feed - want) <= 1e-9 * want);
  }
  // The G0 lead-in reverses into the first cut: noted, not analyzed.
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].find("rapid boundary") != std::string::npos);
}

TEST_CASE("staircase of 1 mm steps at 10 m/min is all Critical") {
  const Report r = analyze_text(testing::staircase_program(1.0, 20, 10000), testing::illustrative_machine());
  REQUIRE(r.blocks.size() == 20);
  for (const BlockAnalysis& b : r.blocks) {
    CHECK(b.length_class == LengthClass::Critical);
    CHECK(b.min_length == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.feed_cap == doctest::Approx(1.0 / 0.012));
    CHECK(b.reduction_pct == doctest::Approx(50.0));
  }
  CHECK(r.histograms.length_class[0] == 20);
  CHECK(r.junctions.size() == 19);
}

TEST_CASE("length classes around L") {
  const MachineLimits m = testing::illustrative_machine();
  // L = 2 mm at 10 m/min: 1.5 Critical, 2 Marginal, 3.9 Marginal, 4 Ok.
  const Report r = analyze_text("G1 X1.5 F10000\nY2\nX5.4\nY6\n", m);
  REQUIRE(r.blocks.size() == 4);
  CHECK(r.blocks[0].length_class == LengthClass::Critical);
  CHECK(r.blocks[1].length_class == LengthClass::Marginal);
  CHECK(r.blocks[2].length_class == LengthClass::Marginal);
  CHECK(r.blocks[3].length_class == LengthClass::Ok);
  CHECK(r.blocks[3].reduction_pct == 0.0);
}

TEST_CASE("tangential junction clamped by the block caps") {
  MachineLimits m = testing::illustrative_machine();
  m.tit = 0.1;
  // Gentle 10 degree turn between two 1 mm blocks.
  const Report r = analyze_text("G1 X1 F10000\nX1.984808 Y0.173648\n", m);
  REQUIRE(r.junctions.size() == 1);
  const JunctionAnalysis& j = r.junctions[0];
  CHECK(j.binding == Binding::BlockLength);
  CHECK(j.predicted_feed == std::min(r.blocks[0].feed_cap, r.blocks[1].feed_cap));
  CHECK(j.corner->v_limit > j.predicted_feed);
}

TEST_CASE("reversal is a full stop") {
  const Report r = analyze_text("G1 X10 F3000\nX0\n", testing::illustrative_machine());
  REQUIRE(r.junctions.size() == 1);
  CHECK(r.junctions[0].predicted_feed == 0.0);
  CHECK(r.junctions[0].reduction_pct == 100.0);
  CHECK(r.junctions[0].severity == SeverityClass::Severe);
}

TEST_CASE("histogram totals match the lists") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 20; ++k) {
    const ParseResult p = parse_program(testing::random_program(rng, 80));
    if (p.path.blocks.empty()) continue;
    const Report r = analyze(p.path, testing::illustrative_machine());
    std::size_t sev = 0, len = 0;
    for (auto c : r.histograms.severity) sev += c;
    for (auto c : r.histograms.length_class) len += c;
    CHECK(sev == r.junctions.size());
    CHECK(len == r.blocks.size());
    CHECK(r.histograms.tangential + r.histograms.curvature == r.junctions.size());
    CHECK(r.blocks.size() == r.block_count);
    for (const JunctionAnalysis& j : r.junctions) {
      CHECK(j.reduction_pct >= 0.0);
      CHECK(j.reduction_pct <= 100.0);
      CHECK(j.severity == classify_severity(j.reduction_pct));
      CHECK(j.predicted_feed >= 0.0);
    }
    CHECK(r.estimated_time >= ideal_cycle_time(p.path, r.machine) * (1 - 1e-12));
  }
}

TEST_CASE("serial and parallel analysis agree") {
  const MachineLimits m = testing::illustrative_machine();
  const ToolPath z = testing::zlevel_path(4, 500, 50);
  AnalyzeOptions serial;
  serial.execution = Execution::Serial;
  require_same(analyze(z, m), analyze(z, m, serial));
  require_same(analyze(z, m), analyze_serial(z, m));

  std::mt19937_64 rng(99);
  for (int k = 0; k < 10; ++k) {
    const ParseResult p = parse_program(testing::random_program(rng, 100));
    if (p.path.blocks.empty()) continue;
    require_same(analyze(p.path, m), analyze_serial(p.path, m));
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(analyze(ToolPath{}, testing::illustrative_machine()), EmptyPathError);
  MachineLimits bad = testing::illustrative_machine();
  bad.t_int = 0;
  CHECK_THROWS_AS(analyze(testing::polygon_path(4, 10, 10), bad), ConfigError);
  ToolPath broken = testing::polygon_path(4, 10, 10);
  broken.blocks.erase(broken.blocks.begin() + 2);
  CHECK_THROWS_AS(analyze(broken, testing::illustrative_machine()), PathContinuityError);
  CHECK_THROWS_AS(analyze_serial(broken, testing::illustrative_machine()), PathContinuityError);
}

TEST_CASE("faster machines never predict lower feeds or longer cycles") {
  const MachineLimits m = testing::illustrative_machine();
  std::mt19937_64 rng(5150);
  for (int k = 0; k < 10; ++k) {
    const ParseResult p = parse_program(testing::random_program(rng, 60));
    if (p.path.blocks.empty()) continue;
    const Report slow = analyze(p.path, m);
    const Report fast = analyze(p.path, scaled(m, 1.7));
    REQUIRE(slow.junctions.size() == fast.junctions.size());
    for (std::size_t i = 0; i < slow.junctions.size(); ++i)
      CHECK(fast.junctions[i].predicted_feed >= slow.junctions[i].predicted_feed);
    CHECK(fast.estimated_time <= slow.estimated_time * (1 + 1e-12));
  }
}

TEST_CASE("looser interpolation tolerance never slows a corner") {
  const ParseResult p = parse_program(testing::staircase_program(3.0, 30, 6000));
  MachineLimits m = testing::illustrative_machine();
  const Report tight = analyze(p.path, m);
  m.tit = 0.1;
  const Report loose = analyze(p.path, m);
  REQUIRE(tight.junctions.size() == loose.junctions.size());
  for (std::size_t i = 0; i < tight.junctions.size(); ++i)
    CHECK(loose.junctions[i].predicted_feed >= tight.junctions[i].predicted_feed);
}

TEST_CASE("longer interpolation time never reduces the Critical count") {
  std::mt19937_64 rng(8);
  const ParseResult p = parse_program(testing::random_program(rng, 200));
  MachineLimits m = testing::illustrative_machine();
  std::size_t prev = 0;
  for (double t : {0.001, 0.004, 0.012, 0.03, 0.1}) {
    m.t_int = t;
    const std::size_t critical = analyze(p.path, m).histograms.length_class[0];
    CHECK(critical >= prev);
    prev = critical;
  }
}

TEST_CASE("severity histogram is invariant under translation and quarter turns") {
  const MachineLimits m = testing::illustrative_machine();
  for (const ToolPath& base : {testing::polygon_path(5, 7, 100), testing::zlevel_path(1, 90, 60)}) {
    const Report r0 = analyze(base, m);
    const Report r1 = analyze(rotate90(base), m);
    const Report r2 = analyze(translate(base, {12.5, -3.25, 4}), m);
    CHECK(r0.histograms == r1.histograms);
    CHECK(r0.histograms == r2.histograms);
  }
}

TEST_CASE("cycle time examples") {
  MachineLimits m = testing::illustrative_machine();
  ToolPath one;
  one.blocks.push_back(make_linear({0, 0, 0}, {100, 0, 0}, 10));
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> no_junctions;
  const std::vector<double> caps{inf};

  CycleTimeOptions steady;
  steady.rest_at_ends = false;
  CHECK(estimate_cycle_time(one, no_junctions, caps, m, steady) == doctest::Approx(10.0).epsilon(1e-12));

  m.x.amax = 100;
  const double t = estimate_cycle_time(one, no_junctions, caps, m);
  CHECK(std::abs(t - oracle::rest_to_rest_time(100, 10, 100)) <= 1e-9);
  CHECK(t == doctest::Approx(10.1));

  // Triangular profile when the block is too short to reach the feed:
  // 2 * sqrt(L / a).
  ToolPath shortp;
  shortp.blocks.push_back(make_linear({0, 0, 0}, {0.25, 0, 0}, 10));
  CHECK(estimate_cycle_time(shortp, no_junctions, caps, m) == doctest::Approx(2 * std::sqrt(0.25 / 100)));
}

TEST_CASE("critical blocks at least double the cycle time") {
  const MachineLimits m = testing::illustrative_machine();
  const ParseResult p = parse_program(testing::line_of_points_program(1.0, 200, 10000));
  REQUIRE_FALSE(p.has_errors());
  const Report r = analyze(p.path, m);
  CHECK(r.blocks[0].feed_cap == doctest::Approx(83.33).epsilon(1e-4));
  CHECK(r.estimated_time >= 2 * ideal_cycle_time(p.path, m));
  CHECK(r.programmed_time == doctest::Approx(ideal_cycle_time(p.path, m)));
}

TEST_CASE("a 60 degree polygon under both readings") {
  // Turn angle 60 degrees is the hexagon; interior angle 60 degrees is the
  // triangle, which turns by 120 degrees and must be crossed more slowly.
  const MachineLimits m = testing::illustrative_machine();
  const Report turn = analyze_text(testing::polygon_program(6, 10, 10000), m);
  const Report interior = analyze_text(testing::polygon_program(3, 10, 10000), m);
  REQUIRE(turn.junctions.size() == 6);
  REQUIRE(interior.junctions.size() == 3);
  CHECK(turn.junctions[0].beta == doctest::Approx(kPi / 3).epsilon(1e-6));
  CHECK(interior.junctions[0].beta == doctest::Approx(2 * kPi / 3).epsilon(1e-6));
  CHECK(interior.junctions[0].predicted_feed < turn.junctions[0].predicted_feed);
}
