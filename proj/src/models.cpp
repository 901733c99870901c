#include "kerf/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kerf/errors.hpp"

namespace kerf {

namespace {

constexpr double kUnitTol = 1e-9;
constexpr double kNegligible = 1e-12;

void require_unit(Vec3 v, const char* what) {
  if (!is_finite(v) || std::abs(norm(v) - 1.0) > kUnitTol)
    throw DomainError(std::string(what) + " must be a unit vector");
}

void require_positive(double v, const std::string& field) {
  if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError(field, "must be a positive number");
}

}  // namespace

void validate(const MachineLimits& machine) {
  static constexpr const char* names[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    const AxisLimits& a = machine.axis(i);
    const std::string prefix = std::string("axes.") + names[i] + ".";
    require_positive(a.vmax, prefix + "vmax_mm_min");
    require_positive(a.amax, prefix + "amax_m_s2");
    require_positive(a.jmax, prefix + "jmax_m_s3");
  }
  require_positive(machine.tit, "tit_mm");
  require_positive(machine.t_int, "t_int_s");
  require_positive(machine.delta_t, "delta_t_s");
}

std::array<double, 3> per_axis(const MachineLimits& machine, LimitKind kind) {
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const AxisLimits& a = machine.axis(i);
    out[i] = kind == LimitKind::Vmax ? a.vmax : (kind == LimitKind::Acceleration ? a.amax : a.jmax);
  }
  return out;
}

std::string_view binding_name(Binding b) {
  switch (b) {
    case Binding::Vmax: return "vmax";
    case Binding::Acceleration: return "acceleration";
    case Binding::Jerk: return "jerk";
    case Binding::BlockLength: return "block_length";
  }
  return "jerk";
}

double corner_radius(double beta, double l1, double l2, double tit) {
  if (!(beta > 0.0 && beta < std::numbers::pi))
    throw DomainError("turn angle must lie in (0, pi)");
  if (!(l1 > 0.0 && l2 > 0.0)) throw DomainError("block lengths must be positive");
  if (!(tit >= 0.0)) throw DomainError("interpolation tolerance must be non-negative");

  const double half = 0.5 * beta;
  const double c = std::cos(half);
  // 1 - cos(h) written as 2 sin^2(h/2) to keep precision at small angles.
  const double s = std::sin(0.5 * half);
  const double one_minus_cos = 2.0 * s * s;
  const double l = std::min(l1, l2);
  const double by_tolerance = tit * c / one_minus_cos;
  const double by_length = l / (2.0 * std::sin(half)) - tit;
  return std::max(0.0, std::min(by_tolerance, by_length));
}

double sweep_capacity(Vec3 t1, Vec3 u, double sweep, const std::array<double, 3>& limits) {
  require_unit(t1, "start direction");
  if (!std::isfinite(sweep) || sweep < 0.0) throw DomainError("sweep angle must be non-negative");
  const bool sweeping = sweep > 0.0;
  if (sweeping) require_unit(u, "rotation direction");

  double capacity = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double a = t1[i];
    const double b = sweeping ? u[i] : 0.0;
    double reach = std::abs(a);
    if (sweeping) {
      reach = std::max(reach, std::abs(a * std::cos(sweep) + b * std::sin(sweep)));
      // |t(alpha).e_i| = A |cos(alpha - phi)| peaks at alpha = phi + k*pi.
      double phi = std::atan2(b, a);
      if (phi < 0.0) phi += std::numbers::pi;
      if (phi <= sweep) reach = std::hypot(a, b);
    }
    if (reach < kNegligible) continue;
    capacity = std::min(capacity, limits[i] / reach);
  }
  return capacity;
}

double directional_capacity(Vec3 t1, Vec3 t2, double beta, const std::array<double, 3>& limits) {
  require_unit(t1, "start direction");
  require_unit(t2, "end direction");
  if (!std::isfinite(beta) || beta < 0.0) throw DomainError("sweep angle must be non-negative");

  // Rotation from t1 towards t2 in their common plane.
  const Vec3 perp = t2 - dot(t1, t2) * t1;
  const double perp_norm = norm(perp);
  if (perp_norm > kNegligible) return sweep_capacity(t1, perp / perp_norm, beta, limits);
  if (beta > kNegligible && dot(t1, t2) < 0.0)
    throw DomainError("rotation plane undefined for opposite directions");
  return sweep_capacity(t1, {}, 0.0, limits);
}

double directional_capacity(Vec3 t, const std::array<double, 3>& limits) {
  return directional_capacity(t, t, 0.0, limits);
}

CornerModel1Result model1_junction_feed(const Block& b1, const Block& b2, double beta,
                                        const MachineLimits& machine, double angle_tol) {
  CornerModel1Result r;
  if (beta >= std::numbers::pi - angle_tol) {
    r.binding = Binding::Jerk;
    return r;
  }

  const Vec3 t1 = tangent_at(b1, Where::End);
  const Vec3 t2 = tangent_at(b2, Where::Start);
  r.radius = corner_radius(beta, block_length(b1), block_length(b2), machine.tit);

  // Normals of the inserted arc rotate in step with its tangents.
  const Vec3 u = normalized(t2 - dot(t1, t2) * t1);
  const Vec3 n1 = u;
  const Vec3 n2 = normalized(-std::sin(beta) * t1 + std::cos(beta) * u);

  r.jerk = directional_capacity(t1, t2, beta, per_axis(machine, LimitKind::Jerk));
  r.vmax_t = directional_capacity(t1, t2, beta, per_axis(machine, LimitKind::Vmax));
  r.acceleration = directional_capacity(n1, n2, beta, per_axis(machine, LimitKind::Acceleration));

  r.v_fa = std::sqrt(r.acceleration * r.radius);
  r.v_fjerk = std::cbrt(r.jerk * r.radius * r.radius);

  if (r.v_fjerk <= r.v_fa && r.v_fjerk <= r.vmax_t) {
    r.binding = Binding::Jerk;
    r.v_limit = r.v_fjerk;
  } else if (r.v_fa <= r.vmax_t) {
    r.binding = Binding::Acceleration;
    r.v_limit = r.v_fa;
  } else {
    r.binding = Binding::Vmax;
    r.v_limit = r.vmax_t;
  }
  return r;
}

double tangential_jerk(Vec3 tangent, const MachineLimits& machine) {
  return directional_capacity(tangent, per_axis(machine, LimitKind::Jerk));
}

double model2_seg_arc_feed(double r, Vec3 tangent, const MachineLimits& machine) {
  if (!(r > 0.0)) throw DomainError("arc radius must be positive");
  const double jerk = tangential_jerk(tangent, machine);
  const double v = std::sqrt(jerk * machine.delta_t * r);
  return std::min(v, directional_capacity(tangent, per_axis(machine, LimitKind::Vmax)));
}

std::optional<double> model2_arc_arc_feed(double r1, double r2, Vec3 tangent,
                                          const MachineLimits& machine, bool opposite_turning) {
  if (!(r1 > 0.0 && r2 > 0.0)) throw DomainError("arc radii must be positive");
  const double gap = opposite_turning ? r1 + r2 : std::abs(r1 - r2);
  if (gap <= kNegligible * std::max(r1, r2)) return std::nullopt;
  const double jerk = tangential_jerk(tangent, machine);
  const double v = std::sqrt(r1 * r2 * jerk * machine.delta_t / gap);
  return std::min(v, directional_capacity(tangent, per_axis(machine, LimitKind::Vmax)));
}

double model2_curvature_jump_feed(double curvature_jump, Vec3 tangent,
                                  const MachineLimits& machine) {
  if (!(curvature_jump > 0.0)) throw DomainError("curvature jump must be positive");
  const double jerk = tangential_jerk(tangent, machine);
  const double v = std::sqrt(jerk * machine.delta_t / curvature_jump);
  return std::min(v, directional_capacity(tangent, per_axis(machine, LimitKind::Vmax)));
}

long double min_block_length(double v_programmed, double t_int) {
  return static_cast<long double>(v_programmed) * static_cast<long double>(t_int);
}

double block_feed_cap(long double length, double t_int) {
  return static_cast<double>(length / static_cast<long double>(t_int));
}

}  // namespace kerf
