#pragma once

// Machine-behaviour models that predict the feed a jerk-limited HSM
// controller can hold:
//   - tangential discontinuity: the controller rounds the corner with an
//     arc sized by the interpolation tolerance, then crosses it at the
//     feed allowed by normal acceleration and tangential jerk;
//   - curvature discontinuity: the normal acceleration jumps over an
//     elementary crossing time, bounded by the tangential jerk;
//   - controller capacity: a block shorter than feed * interpolation time
//     cannot be processed at the programmed feed.

#include <array>
#include <optional>
#include <string_view>

#include "kerf/geometry.hpp"

namespace kerf {

struct AxisLimits {
  double vmax = 0.0;  // mm/s
  double amax = 0.0;  // mm/s^2
  double jmax = 0.0;  // mm/s^3

  friend bool operator==(const AxisLimits&, const AxisLimits&) = default;
};

struct MachineLimits {
  AxisLimits x;
  AxisLimits y;
  AxisLimits z;
  double tit = 0.0;      // trajectory interpolation tolerance, mm
  double t_int = 0.0;    // controller interpolation time, s
  double delta_t = 0.0;  // elementary curvature-crossing time, s

  const AxisLimits& axis(int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend bool operator==(const MachineLimits&, const MachineLimits&) = default;
};

inline constexpr double kDefaultInterpolationTime = 0.012;  // Siemens 840D
// Uncalibrated: the crossing time is a machine-specific measurement.
inline constexpr double kDefaultCrossingTime = 0.01;

// Throws ConfigError naming the first non-positive or non-finite field.
void validate(const MachineLimits& machine);

enum class LimitKind { Vmax, Acceleration, Jerk };

std::array<double, 3> per_axis(const MachineLimits& machine, LimitKind kind);

enum class Binding { Vmax, Acceleration, Jerk, BlockLength };

std::string_view binding_name(Binding b);

// Radius of the arc the controller inserts at a corner with tangent turn
// angle beta between blocks of lengths l1, l2. Clamped below at zero.
double corner_radius(double beta, double l1, double l2, double tit);

// Capacity of a limit kind along a direction that rotates from t1 towards
// t2 through angle beta: min over axes of limit_i / max_alpha |t(alpha).e_i|.
// Axes the direction never projects onto are ignored.
double directional_capacity(Vec3 t1, Vec3 t2, double beta, const std::array<double, 3>& limits);

// Same, with the rotation given explicitly: t(alpha) = cos(alpha) t1 + sin(alpha) u
// for alpha in [0, sweep]. Sweeps beyond pi are allowed (arcs).
double sweep_capacity(Vec3 t1, Vec3 u, double sweep, const std::array<double, 3>& limits);

// Capacity along one fixed direction (beta = 0).
double directional_capacity(Vec3 t, const std::array<double, 3>& limits);

struct CornerModel1Result {
  double radius = 0.0;        // inserted arc radius, mm
  double acceleration = 0.0;  // effective normal acceleration, mm/s^2
  double jerk = 0.0;          // effective tangential jerk, mm/s^3
  double vmax_t = 0.0;        // effective feed capacity, mm/s
  double v_fa = 0.0;          // acceleration-limited feed, mm/s
  double v_fjerk = 0.0;       // jerk-limited feed, mm/s
  double v_limit = 0.0;
  Binding binding = Binding::Jerk;

  friend bool operator==(const CornerModel1Result&, const CornerModel1Result&) = default;
};

// Tangential discontinuity between b1 and b2 with turn angle beta.
// A full reversal (beta >= pi - angle_tol) or a zero radius forces a stop.
CornerModel1Result model1_junction_feed(const Block& b1, const Block& b2, double beta,
                                        const MachineLimits& machine,
                                        double angle_tol = Tolerances{}.angle);

// Per-axis jerk seen along a tangent: min_i jmax_i / |t.e_i|.
double tangential_jerk(Vec3 tangent, const MachineLimits& machine);

// Segment <-> arc of radius r.
double model2_seg_arc_feed(double r, Vec3 tangent, const MachineLimits& machine);

// Arc <-> arc. nullopt when there is no curvature jump (equal radii, same turn).
std::optional<double> model2_arc_arc_feed(double r1, double r2, Vec3 tangent,
                                          const MachineLimits& machine,
                                          bool opposite_turning = false);

// Arc <-> arc in different planes, expressed through the curvature-vector jump.
double model2_curvature_jump_feed(double curvature_jump, Vec3 tangent,
                                  const MachineLimits& machine);

// Shortest block the controller can process at the programmed feed.
// Extended precision keeps block_feed_cap(min_block_length(v, t), t) == v.
long double min_block_length(double v_programmed, double t_int);
double block_feed_cap(long double length, double t_int);

}  // namespace kerf
