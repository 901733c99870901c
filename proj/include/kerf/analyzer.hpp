#pragma once

// Tool-path evaluation: every cutting block is checked against the
// controller's interpolation capacity, every junction between cutting
// blocks against the corner and curvature crossing models, and the
// results are binned for display.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kerf/geometry.hpp"
#include "kerf/models.hpp"

namespace kerf {

enum class SeverityClass { None, Moderate, High, Severe };
enum class LengthClass { Critical, Marginal, Ok };

std::string_view severity_name(SeverityClass s);
std::string_view length_class_name(LengthClass c);
std::optional<SeverityClass> severity_from_name(std::string_view s);
std::optional<LengthClass> length_class_from_name(std::string_view s);

// Lower-inclusive edges in percent: None [0, e0), Moderate [e0, e1),
// High [e1, e2), Severe [e2, 100].
struct SeverityBins {
  std::array<double, 3> edges{10.0, 50.0, 90.0};

  friend bool operator==(const SeverityBins&, const SeverityBins&) = default;
};

SeverityClass classify_severity(double reduction_pct, const SeverityBins& bins = {});

enum class Execution { Serial, Parallel };

struct AnalyzeOptions {
  Tolerances tolerances;
  SeverityBins bins;
  // Blocks in [L, marginal_factor * L) are Marginal.
  double marginal_factor = 2.0;
  Execution execution = Execution::Parallel;
};

struct BlockAnalysis {
  std::size_t index = 0;
  bool rapid = false;
  bool arc = false;
  int source_line = 0;
  double length = 0.0;          // mm
  double programmed_feed = 0.0; // mm/s
  double min_length = 0.0;      // L, mm
  double feed_cap = 0.0;        // mm/s, infinite for rapids
  double reduction_pct = 0.0;   // of the programmed feed imposed by the cap
  LengthClass length_class = LengthClass::Ok;

  friend bool operator==(const BlockAnalysis&, const BlockAnalysis&) = default;
};

enum class JunctionType { Tangential, CurvatureSegmentArc, CurvatureArcArc };

std::string_view junction_type_name(JunctionType t);
std::optional<JunctionType> junction_type_from_name(std::string_view s);

struct JunctionAnalysis {
  std::size_t index = 0;  // junction between blocks index and index + 1
  int source_line = 0;    // line of block index + 1
  JunctionType type = JunctionType::Tangential;
  double beta = 0.0;                  // tangent turn angle, tangential only
  double r_before = kInfiniteRadius;  // curvature only
  double r_after = kInfiniteRadius;
  bool opposite_turning = false;
  Point3 location;
  double programmed_feed = 0.0;
  double predicted_feed = 0.0;
  double reduction_pct = 0.0;
  SeverityClass severity = SeverityClass::None;
  Binding binding = Binding::Jerk;
  // Corner model detail, tangential only.
  std::optional<CornerModel1Result> corner;

  friend bool operator==(const JunctionAnalysis&, const JunctionAnalysis&) = default;
};

struct Histograms {
  std::array<std::size_t, 4> severity{};      // by SeverityClass
  std::array<std::size_t, 3> length_class{};  // by LengthClass
  std::size_t tangential = 0;
  std::size_t curvature = 0;

  friend bool operator==(const Histograms&, const Histograms&) = default;
};

struct Report {
  std::size_t block_count = 0;
  double total_length = 0.0;     // mm, all blocks
  double cutting_length = 0.0;   // mm, non-rapid blocks
  double programmed_time = 0.0;  // s, every block at its programmed feed
  double estimated_time = 0.0;   // s
  MachineLimits machine;
  SeverityBins bins;
  std::vector<BlockAnalysis> blocks;
  std::vector<JunctionAnalysis> junctions;
  Histograms histograms;
  std::vector<std::string> notes;
};

// Throws EmptyPathError for a path without blocks, PathContinuityError or
// InvalidGeometryError for a malformed path, ConfigError for bad limits.
Report analyze(const ToolPath& path, const MachineLimits& machine, const AnalyzeOptions& options = {});

// Single-threaded reference of analyze(); identical output.
Report analyze_serial(const ToolPath& path, const MachineLimits& machine,
                      AnalyzeOptions options = {});

// Feed a rapid block is traversed at: the machine's capacity along it.
double rapid_feed(const Block& block, const MachineLimits& machine);

struct CycleTimeOptions {
  bool rest_at_ends = true;
};

// Per-block trapezoidal profiles after forward/backward feed propagation.
// junction_feeds[i] bounds the feed between blocks i and i + 1 (infinity for
// unconstrained); block_caps[i] bounds the cruise feed of block i.
double estimate_cycle_time(const ToolPath& path, std::span<const double> junction_feeds,
                           std::span<const double> block_caps, const MachineLimits& machine,
                           const CycleTimeOptions& options = {});

// Time at programmed feed (rapids at rapid_feed), without dynamics.
double ideal_cycle_time(const ToolPath& path, const MachineLimits& machine);

}  // namespace kerf
