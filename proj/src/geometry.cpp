#include "kerf/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kerf/errors.hpp"

namespace kerf {

namespace {

constexpr double kMinLength = 1e-9;
constexpr double kRadiusMatch = 1e-6;
constexpr double kClosedArc = 1e-9;

std::string describe(const Block& block) {
  return "block at line " + std::to_string(block.source_line);
}

// Orientation of travel about the plane normal: +n for CCW, -n for CW.
Vec3 travel_normal(const ArcMove& arc) {
  Vec3 n = plane_normal(arc.plane);
  return arc.clockwise ? -n : n;
}

}  // namespace

Vec3 plane_normal(Plane plane) {
  switch (plane) {
    case Plane::XY: return {0, 0, 1};
    case Plane::XZ: return {0, 1, 0};
    case Plane::YZ: return {1, 0, 0};
  }
  return {0, 0, 1};
}

std::string_view plane_name(Plane plane) {
  switch (plane) {
    case Plane::XY: return "XY";
    case Plane::XZ: return "XZ";
    case Plane::YZ: return "YZ";
  }
  return "XY";
}

Point3 Block::start() const {
  return std::visit([](const auto& s) { return s.start; }, shape);
}

Point3 Block::end() const {
  return std::visit([](const auto& s) { return s.end; }, shape);
}

void validate(const Block& block) {
  if (!is_finite(block.start()) || !is_finite(block.end()))
    throw InvalidGeometryError(describe(block) + ": non-finite coordinate");
  if (!block.rapid && !(block.feed > 0.0))
    throw InvalidGeometryError(describe(block) + ": programmed feed must be positive");

  if (!block.is_arc()) {
    if (distance(block.start(), block.end()) <= kMinLength)
      throw InvalidGeometryError(describe(block) + ": zero-length segment");
    return;
  }

  const ArcMove& arc = block.arc();
  if (!is_finite(arc.center))
    throw InvalidGeometryError(describe(block) + ": non-finite arc center");
  const double r_start = distance(arc.center, arc.start);
  const double r_end = distance(arc.center, arc.end);
  if (r_start <= kMinLength)
    throw InvalidGeometryError(describe(block) + ": zero arc radius");
  if (std::abs(r_start - r_end) > kRadiusMatch)
    throw InvalidGeometryError(describe(block) + ": arc radii at start and end differ");
  const Vec3 n = plane_normal(arc.plane);
  if (std::abs(dot(arc.center - arc.start, n)) > kRadiusMatch ||
      std::abs(dot(arc.end - arc.start, n)) > kRadiusMatch)
    throw InvalidGeometryError(describe(block) + ": arc leaves its plane");
}

void validate(const ToolPath& path, double connection_tol) {
  for (std::size_t i = 0; i < path.blocks.size(); ++i) {
    validate(path.blocks[i]);
    if (i > 0 && distance(path.blocks[i - 1].end(), path.blocks[i].start()) > connection_tol)
      throw PathContinuityError("blocks " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                " are not connected");
  }
}

Block make_linear(Point3 start, Point3 end, double feed, bool rapid, int source_line) {
  Block b{LinearMove{start, end}, rapid ? 0.0 : feed, rapid, source_line};
  validate(b);
  return b;
}

Block make_arc(Point3 start, Point3 end, Point3 center, Plane plane, bool clockwise, double feed,
               int source_line) {
  Block b{ArcMove{start, end, center, plane, clockwise}, feed, false, source_line};
  validate(b);
  return b;
}

double arc_radius(const ArcMove& arc) { return distance(arc.center, arc.start); }

double swept_angle(const ArcMove& arc) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (distance(arc.start, arc.end) <= kClosedArc) return two_pi;
  const Vec3 u = arc.start - arc.center;
  const Vec3 w = arc.end - arc.center;
  double a = std::atan2(dot(cross(u, w), travel_normal(arc)), dot(u, w));
  if (a <= 0.0) a += two_pi;
  return a;
}

double block_length(const Block& block) {
  if (!block.is_arc()) return distance(block.start(), block.end());
  const ArcMove& arc = block.arc();
  return arc_radius(arc) * swept_angle(arc);
}

Vec3 tangent_at(const Block& block, Where where) {
  if (!block.is_arc()) {
    const Vec3 d = block.end() - block.start();
    const double len = norm(d);
    if (!(len > kMinLength)) throw InvalidGeometryError(describe(block) + ": zero-length segment");
    return d / len;
  }
  const ArcMove& arc = block.arc();
  const Point3 p = where == Where::Start ? arc.start : arc.end;
  const Vec3 t = cross(travel_normal(arc), p - arc.center);
  const double len = norm(t);
  if (!(len > kMinLength)) throw InvalidGeometryError(describe(block) + ": zero arc radius");
  return t / len;
}

Vec3 curvature_vector(const Block& block, Where where) {
  if (!block.is_arc()) return {};
  const ArcMove& arc = block.arc();
  const Point3 p = where == Where::Start ? arc.start : arc.end;
  const Vec3 to_center = arc.center - p;
  return to_center / dot(to_center, to_center);
}

Point3 point_at(const Block& block, double s) {
  if (!block.is_arc()) return block.start() + s * (block.end() - block.start());
  const ArcMove& arc = block.arc();
  // Rodrigues rotation of the start radius about the travel normal.
  const Vec3 k = travel_normal(arc);
  const Vec3 v = arc.start - arc.center;
  const double phi = s * swept_angle(arc);
  const Vec3 rotated = std::cos(phi) * v + std::sin(phi) * cross(k, v) +
                       (1.0 - std::cos(phi)) * dot(k, v) * k;
  return arc.center + rotated;
}

double turn_angle(Vec3 t1, Vec3 t2) { return std::atan2(norm(cross(t1, t2)), dot(t1, t2)); }

JunctionKind classify_junction(const Block& b1, const Block& b2, const Tolerances& tol) {
  if (distance(b1.end(), b2.start()) > tol.connection)
    throw PathContinuityError("blocks at lines " + std::to_string(b1.source_line) + " and " +
                              std::to_string(b2.source_line) + " are not connected");

  const double beta = turn_angle(tangent_at(b1, Where::End), tangent_at(b2, Where::Start));
  if (beta > tol.angle) return TangentialJunction{beta};

  const Vec3 k1 = curvature_vector(b1, Where::End);
  const Vec3 k2 = curvature_vector(b2, Where::Start);
  const double jump = norm(k1 - k2);
  if (jump <= tol.curvature) return SmoothJunction{};

  CurvatureJunction c;
  c.r_before = b1.is_arc() ? arc_radius(b1.arc()) : kInfiniteRadius;
  c.r_after = b2.is_arc() ? arc_radius(b2.arc()) : kInfiniteRadius;
  c.curvature_jump = jump;
  if (b1.is_arc() && b2.is_arc()) {
    const double n1 = norm(k1);
    const double n2 = norm(k2);
    const double cos_between = dot(k1, k2) / (n1 * n2);
    c.opposite_turning = cos_between < 0.0;
    c.coplanar = std::abs(cos_between) >= 1.0 - 1e-9;
  }
  return c;
}

}  // namespace kerf
