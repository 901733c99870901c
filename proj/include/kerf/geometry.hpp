#pragma once

// Tool-path elements (segments and circular arcs in principal planes),
// their tangents and curvature, and junction classification.

#include <limits>
#include <string_view>
#include <variant>
#include <vector>

#include "kerf/vec3.hpp"

namespace kerf {

enum class Plane { XY, XZ, YZ };

// Right-handed normal of a principal plane: counter-clockwise arcs turn
// positively about it (G17 -> +Z, G18 -> +Y, G19 -> +X).
Vec3 plane_normal(Plane plane);
std::string_view plane_name(Plane plane);

struct LinearMove {
  Point3 start;
  Point3 end;
};

struct ArcMove {
  Point3 start;
  Point3 end;
  Point3 center;
  Plane plane = Plane::XY;
  bool clockwise = false;
};

struct Block {
  std::variant<LinearMove, ArcMove> shape;
  double feed = 0.0;  // programmed feed, mm/s; 0 for rapids
  bool rapid = false;
  int source_line = 0;

  bool is_arc() const { return std::holds_alternative<ArcMove>(shape); }
  const ArcMove& arc() const { return std::get<ArcMove>(shape); }
  const LinearMove& linear() const { return std::get<LinearMove>(shape); }
  Point3 start() const;
  Point3 end() const;
};

struct ToolPath {
  std::vector<Block> blocks;
};

struct Tolerances {
  double connection = 1e-6;  // mm
  double angle = 1e-4;       // rad
  double curvature = 1e-6;   // 1/mm
};

// Throws InvalidGeometryError when the block breaks its invariants.
void validate(const Block& block);
// Validates every block and the endpoint chaining between them.
void validate(const ToolPath& path, double connection_tol = Tolerances{}.connection);

Block make_linear(Point3 start, Point3 end, double feed, bool rapid = false, int source_line = 0);
Block make_arc(Point3 start, Point3 end, Point3 center, Plane plane, bool clockwise, double feed,
               int source_line = 0);

enum class Where { Start, End };

Vec3 tangent_at(const Block& block, Where where);

double arc_radius(const ArcMove& arc);
// Swept angle in (0, 2*pi]; a closed arc (start == end) sweeps 2*pi.
double swept_angle(const ArcMove& arc);
double block_length(const Block& block);

// Curvature vector at an endpoint: zero for segments, (center - p) / R^2 for arcs.
Vec3 curvature_vector(const Block& block, Where where);

// Point at parameter s in [0, 1] along the block.
Point3 point_at(const Block& block, double s);

inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

struct SmoothJunction {};
struct TangentialJunction {
  double beta = 0.0;  // tangent turn angle, rad
};
struct CurvatureJunction {
  double r_before = kInfiniteRadius;  // mm, infinite for a segment
  double r_after = kInfiniteRadius;
  // Centres on opposite sides of the path (S-bend between two arcs).
  bool opposite_turning = false;
  // Both arcs bend in a common plane (curvature vectors are parallel).
  bool coplanar = true;
  double curvature_jump = 0.0;  // |k_before - k_after|, 1/mm
};

using JunctionKind = std::variant<SmoothJunction, TangentialJunction, CurvatureJunction>;

// Angle between two unit vectors, robust near 0 and pi.
double turn_angle(Vec3 t1, Vec3 t2);

JunctionKind classify_junction(const Block& b1, const Block& b2, const Tolerances& tol = {});

}  // namespace kerf
