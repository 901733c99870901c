#include "kerf/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "kerf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kerf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double reduction_percent(double predicted, double programmed) {
  if (!(programmed > 0.0)) return 0.0;
  return std::clamp(100.0 * (1.0 - predicted / programmed), 0.0, 100.0);
}

BlockAnalysis evaluate_block(const ToolPath& path, std::size_t i, const MachineLimits& machine,
                             const AnalyzeOptions& options) {
  const Block& b = path.blocks[i];
  BlockAnalysis a;
  a.index = i;
  a.rapid = b.rapid;
  a.arc = b.is_arc();
  a.source_line = b.source_line;
  a.length = block_length(b);
  a.programmed_feed = b.feed;
  if (b.rapid) {
    a.feed_cap = kInf;
    a.length_class = LengthClass::Ok;
    return a;
  }
  const long double min_len = min_block_length(b.feed, machine.t_int);
  a.min_length = static_cast<double>(min_len);
  a.feed_cap = block_feed_cap(a.length, machine.t_int);
  a.reduction_pct = reduction_percent(a.feed_cap, b.feed);
  if (a.length < min_len)
    a.length_class = LengthClass::Critical;
  else if (a.length < options.marginal_factor * min_len)
    a.length_class = LengthClass::Marginal;
  else
    a.length_class = LengthClass::Ok;
  return a;
}

struct JunctionOutcome {
  std::optional<JunctionAnalysis> record;
  std::optional<std::string> note;
  double feed_limit = kInf;  // for cycle-time propagation
};

JunctionOutcome evaluate_junction(const ToolPath& path, std::size_t i,
                                  std::span<const BlockAnalysis> blocks,
                                  const MachineLimits& machine, const AnalyzeOptions& options) {
  const Block& b1 = path.blocks[i];
  const Block& b2 = path.blocks[i + 1];
  const JunctionKind kind = classify_junction(b1, b2, options.tolerances);
  JunctionOutcome out;

  if (b1.rapid || b2.rapid) {
    if (std::holds_alternative<TangentialJunction>(kind)) out.feed_limit = 0.0;
    if (b1.rapid != b2.rapid)
      out.note = "junction " + std::to_string(i) + " (line " + std::to_string(b2.source_line) +
                 ") skipped: rapid boundary";
    return out;
  }
  if (std::holds_alternative<SmoothJunction>(kind)) return out;

  JunctionAnalysis j;
  j.index = i;
  j.source_line = b2.source_line;
  j.location = b1.end();
  j.programmed_feed = std::min(b1.feed, b2.feed);

  if (const auto* tang = std::get_if<TangentialJunction>(&kind)) {
    j.type = JunctionType::Tangential;
    j.beta = tang->beta;
    const CornerModel1Result m = model1_junction_feed(b1, b2, tang->beta, machine,
                                                      options.tolerances.angle);
    j.corner = m;
    j.predicted_feed = m.v_limit;
    j.binding = m.binding;
    const double cap = std::min(blocks[i].feed_cap, blocks[i + 1].feed_cap);
    if (cap < j.predicted_feed) {
      j.predicted_feed = cap;
      j.binding = Binding::BlockLength;
    }
  } else {
    const auto& curv = std::get<CurvatureJunction>(kind);
    j.r_before = curv.r_before;
    j.r_after = curv.r_after;
    j.opposite_turning = curv.opposite_turning;
    const Vec3 t = tangent_at(b1, Where::End);
    if (!b1.is_arc() || !b2.is_arc()) {
      j.type = JunctionType::CurvatureSegmentArc;
      j.predicted_feed = model2_seg_arc_feed(b1.is_arc() ? curv.r_before : curv.r_after, t, machine);
    } else {
      j.type = JunctionType::CurvatureArcArc;
      if (curv.coplanar) {
        const auto v = model2_arc_arc_feed(curv.r_before, curv.r_after, t, machine,
                                           curv.opposite_turning);
        if (!v) return out;
        j.predicted_feed = *v;
      } else {
        j.predicted_feed = model2_curvature_jump_feed(curv.curvature_jump, t, machine);
      }
    }
    const double vmax_t = directional_capacity(t, per_axis(machine, LimitKind::Vmax));
    j.binding = j.predicted_feed >= vmax_t ? Binding::Vmax : Binding::Jerk;
  }

  j.reduction_pct = reduction_percent(j.predicted_feed, j.programmed_feed);
  j.severity = classify_severity(j.reduction_pct, options.bins);
  out.feed_limit = j.predicted_feed;
  out.record = std::move(j);
  return out;
}

Report assemble(const ToolPath& path, const MachineLimits& machine, const AnalyzeOptions& options,
                std::vector<BlockAnalysis> blocks, std::vector<JunctionOutcome> outcomes) {
  Report r;
  r.block_count = path.blocks.size();
  r.machine = machine;
  r.bins = options.bins;

  std::vector<double> junction_feeds;
  junction_feeds.reserve(outcomes.size());
  for (JunctionOutcome& o : outcomes) {
    junction_feeds.push_back(o.feed_limit);
    if (o.note) r.notes.push_back(std::move(*o.note));
    if (!o.record) continue;
    const JunctionAnalysis& j = *o.record;
    ++r.histograms.severity[static_cast<std::size_t>(j.severity)];
    if (j.type == JunctionType::Tangential)
      ++r.histograms.tangential;
    else
      ++r.histograms.curvature;
    r.junctions.push_back(std::move(*o.record));
  }

  std::vector<double> caps;
  caps.reserve(blocks.size());
  for (const BlockAnalysis& b : blocks) {
    ++r.histograms.length_class[static_cast<std::size_t>(b.length_class)];
    r.total_length += b.length;
    if (!b.rapid) r.cutting_length += b.length;
    caps.push_back(b.feed_cap);
  }
  r.blocks = std::move(blocks);
  r.programmed_time = ideal_cycle_time(path, machine);
  r.estimated_time = estimate_cycle_time(path, junction_feeds, caps, machine);
  return r;
}

void check_inputs(const ToolPath& path, const MachineLimits& machine, const AnalyzeOptions& options) {
  if (path.blocks.empty()) throw EmptyPathError("tool path has no blocks");
  validate(machine);
  validate(path, options.tolerances.connection);
}

// Trapezoidal (or triangular) profile over one block.
double block_time(double length, double v0, double v1, double cruise, double accel) {
  const double d_acc = (cruise * cruise - v0 * v0) / (2.0 * accel);
  const double d_dec = (cruise * cruise - v1 * v1) / (2.0 * accel);
  if (d_acc + d_dec <= length)
    return (cruise - v0) / accel + (cruise - v1) / accel + (length - d_acc - d_dec) / cruise;
  const double peak = std::sqrt(std::max(0.0, (2.0 * accel * length + v0 * v0 + v1 * v1) / 2.0));
  return (std::max(peak - v0, 0.0) + std::max(peak - v1, 0.0)) / accel;
}

// Capacity of one limit kind over every tangent direction a block takes.
double block_capacity(const Block& b, LimitKind kind, const MachineLimits& machine) {
  const Vec3 t = tangent_at(b, Where::Start);
  if (!b.is_arc()) return directional_capacity(t, per_axis(machine, kind));
  const ArcMove& a = b.arc();
  const Vec3 inward = normalized(a.center - a.start);
  return sweep_capacity(t, inward, swept_angle(a), per_axis(machine, kind));
}

}  // namespace

std::string_view severity_name(SeverityClass s) {
  switch (s) {
    case SeverityClass::None: return "None";
    case SeverityClass::Moderate: return "Moderate";
    case SeverityClass::High: return "High";
    case SeverityClass::Severe: return "Severe";
  }
  return "None";
}

std::string_view length_class_name(LengthClass c) {
  switch (c) {
    case LengthClass::Critical: return "Critical";
    case LengthClass::Marginal: return "Marginal";
    case LengthClass::Ok: return "Ok";
  }
  return "Ok";
}

std::optional<SeverityClass> severity_from_name(std::string_view s) {
  for (auto c : {SeverityClass::None, SeverityClass::Moderate, SeverityClass::High,
                 SeverityClass::Severe})
    if (severity_name(c) == s) return c;
  return std::nullopt;
}

std::optional<LengthClass> length_class_from_name(std::string_view s) {
  for (auto c : {LengthClass::Critical, LengthClass::Marginal, LengthClass::Ok})
    if (length_class_name(c) == s) return c;
  return std::nullopt;
}

std::string_view junction_type_name(JunctionType t) {
  switch (t) {
    case JunctionType::Tangential: return "tangential";
    case JunctionType::CurvatureSegmentArc: return "curvature_segment_arc";
    case JunctionType::CurvatureArcArc: return "curvature_arc_arc";
  }
  return "tangential";
}

std::optional<JunctionType> junction_type_from_name(std::string_view s) {
  for (auto t : {JunctionType::Tangential, JunctionType::CurvatureSegmentArc,
                 JunctionType::CurvatureArcArc})
    if (junction_type_name(t) == s) return t;
  return std::nullopt;
}

SeverityClass classify_severity(double reduction_pct, const SeverityBins& bins) {
  if (reduction_pct >= bins.edges[2]) return SeverityClass::Severe;
  if (reduction_pct >= bins.edges[1]) return SeverityClass::High;
  if (reduction_pct >= bins.edges[0]) return SeverityClass::Moderate;
  return SeverityClass::None;
}

Report analyze_serial(const ToolPath& path, const MachineLimits& machine, AnalyzeOptions options) {
  check_inputs(path, machine, options);
  const std::size_t n = path.blocks.size();

  std::vector<BlockAnalysis> blocks;
  blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) blocks.push_back(evaluate_block(path, i, machine, options));

  std::vector<JunctionOutcome> outcomes;
  outcomes.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    outcomes.push_back(evaluate_junction(path, i, blocks, machine, options));

  return assemble(path, machine, options, std::move(blocks), std::move(outcomes));
}

Report analyze(const ToolPath& path, const MachineLimits& machine, const AnalyzeOptions& options) {
  if (options.execution == Execution::Serial) return analyze_serial(path, machine, options);
  check_inputs(path, machine, options);
  const auto n = static_cast<std::ptrdiff_t>(path.blocks.size());

  std::vector<BlockAnalysis> blocks(static_cast<std::size_t>(n));
  std::vector<JunctionOutcome> outcomes(static_cast<std::size_t>(n - 1));
  std::exception_ptr failure;

#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        blocks[i] = evaluate_block(path, static_cast<std::size_t>(i), machine, options);
      } catch (...) {
#pragma omp critical(kerf_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    // Implicit barrier: junction clamps read neighbouring block caps.
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n - 1; ++i) {
      try {
        outcomes[i] = evaluate_junction(path, static_cast<std::size_t>(i), blocks, machine, options);
      } catch (...) {
#pragma omp critical(kerf_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  return assemble(path, machine, options, std::move(blocks), std::move(outcomes));
}

double rapid_feed(const Block& block, const MachineLimits& machine) {
  return block_capacity(block, LimitKind::Vmax, machine);
}

double ideal_cycle_time(const ToolPath& path, const MachineLimits& machine) {
  double t = 0.0;
  for (const Block& b : path.blocks)
    t += block_length(b) / (b.rapid ? rapid_feed(b, machine) : b.feed);
  return t;
}

double estimate_cycle_time(const ToolPath& path, std::span<const double> junction_feeds,
                           std::span<const double> block_caps, const MachineLimits& machine,
                           const CycleTimeOptions& options) {
  const std::size_t n = path.blocks.size();
  if (n == 0) return 0.0;
  if (junction_feeds.size() + 1 != n || block_caps.size() != n)
    throw DomainError("cycle-time inputs do not match the path");

  std::vector<double> cruise(n), accel(n), length(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Block& b = path.blocks[i];
    const double vcap = block_capacity(b, LimitKind::Vmax, machine);
    cruise[i] = std::min({b.rapid ? vcap : b.feed, block_caps[i], vcap});
    accel[i] = block_capacity(b, LimitKind::Acceleration, machine);
    length[i] = block_length(b);
  }

  // v[i] is the feed at the start of block i; v[n] at the end of the path.
  std::vector<double> v(n + 1);
  v[0] = options.rest_at_ends ? 0.0 : cruise[0];
  v[n] = options.rest_at_ends ? 0.0 : cruise[n - 1];
  for (std::size_t i = 1; i < n; ++i)
    v[i] = std::min({junction_feeds[i - 1], cruise[i - 1], cruise[i]});

  for (std::size_t i = 0; i < n; ++i)
    v[i + 1] = std::min(v[i + 1], std::sqrt(v[i] * v[i] + 2.0 * accel[i] * length[i]));
  for (std::size_t i = n; i-- > 0;)
    v[i] = std::min(v[i], std::sqrt(v[i + 1] * v[i + 1] + 2.0 * accel[i] * length[i]));

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    total += block_time(length[i], v[i], v[i + 1], cruise[i], accel[i]);
  return total;
}

}  // namespace kerf
