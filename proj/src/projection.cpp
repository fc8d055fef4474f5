#include "axon/projection.hpp"

#include <cmath>
#include <string>

#include "axon/error.hpp"

namespace axon {

namespace {

constexpr double kCollinearTolerance = 1e-9;
constexpr double kGlyphLength = 10.0;
constexpr double kGlyphLabelGap = 2.0;

Vec2 polar(double deg) { return {std::cos(deg_to_rad(deg)), std::sin(deg_to_rad(deg))}; }

}  // namespace

Point3 axis_vector(AxisDir dir) {
  switch (dir) {
    case AxisDir::kPosX: return {1, 0, 0};
    case AxisDir::kNegX: return {-1, 0, 0};
    case AxisDir::kPosY: return {0, 1, 0};
    case AxisDir::kNegY: return {0, -1, 0};
    case AxisDir::kPosZ: return {0, 0, 1};
    case AxisDir::kNegZ: return {0, 0, -1};
  }
  return {};
}

Axis axis_of(AxisDir dir) {
  switch (dir) {
    case AxisDir::kPosX:
    case AxisDir::kNegX: return Axis::kX;
    case AxisDir::kPosY:
    case AxisDir::kNegY: return Axis::kY;
    default: return Axis::kZ;
  }
}

int sign_of(AxisDir dir) {
  return (dir == AxisDir::kPosX || dir == AxisDir::kPosY || dir == AxisDir::kPosZ) ? 1 : -1;
}

std::string_view axis_dir_name(AxisDir dir) {
  switch (dir) {
    case AxisDir::kPosX: return "+X";
    case AxisDir::kNegX: return "-X";
    case AxisDir::kPosY: return "+Y";
    case AxisDir::kNegY: return "-Y";
    case AxisDir::kPosZ: return "+Z";
    case AxisDir::kNegZ: return "-Z";
  }
  return "";
}

AxisDir parse_axis_dir(std::string_view text) {
  for (AxisDir d : {AxisDir::kPosX, AxisDir::kNegX, AxisDir::kPosY, AxisDir::kNegY, AxisDir::kPosZ,
                    AxisDir::kNegZ}) {
    if (text == axis_dir_name(d)) return d;
  }
  fail(ErrorCode::kInvalidArgument, "bad axis direction '" + std::string(text) + "'");
}

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::kX: return "X";
    case Axis::kY: return "Y";
    case Axis::kZ: return "Z";
  }
  return "";
}

Axis parse_axis(std::string_view text) {
  if (text == "X" || text == "x") return Axis::kX;
  if (text == "Y" || text == "y") return Axis::kY;
  if (text == "Z" || text == "z") return Axis::kZ;
  fail(ErrorCode::kInvalidArgument, "bad axis '" + std::string(text) + "'");
}

double component(Point3 p, Axis axis) {
  switch (axis) {
    case Axis::kX: return p.x;
    case Axis::kY: return p.y;
    case Axis::kZ: return p.z;
  }
  return 0.0;
}

Point3 unit(Axis axis) {
  switch (axis) {
    case Axis::kX: return {1, 0, 0};
    case Axis::kY: return {0, 1, 0};
    case Axis::kZ: return {0, 0, 1};
  }
  return {};
}

Projection isometric() { return {polar(210.0), polar(-30.0), {0.0, 1.0}, "isometric"}; }

Projection frontal_dimetric() {
  const double c = std::cos(deg_to_rad(45.0));
  const double s = std::sin(deg_to_rad(45.0));
  return {{-0.5 * c, -0.5 * s}, {1.0, 0.0}, {0.0, 1.0}, "frontal-dimetric"};
}

std::vector<Projection> projection_presets() { return {isometric(), frontal_dimetric()}; }

Projection projection_by_name(std::string_view name) {
  for (const Projection& p : projection_presets()) {
    if (p.name == name) return p;
  }
  fail(ErrorCode::kUnknownProjection, "unknown projection '" + std::string(name) + "'");
}

void validate_projection(const Projection& proj) {
  if (!is_finite(proj.ex) || !is_finite(proj.ey) || !is_finite(proj.ez)) {
    fail(ErrorCode::kBadProjection, "projection basis is not finite");
  }
  const Vec2 basis[3] = {proj.ex, proj.ey, proj.ez};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double scale = norm(basis[i]) * norm(basis[j]);
      if (scale == 0.0 || std::abs(cross(basis[i], basis[j])) <= kCollinearTolerance * scale) {
        fail(ErrorCode::kBadProjection, "projection axes " + std::to_string(i) + " and " +
                                            std::to_string(j) + " are collinear");
      }
    }
  }
}

Vec2 project(Point3 p, const Projection& proj) { return p.x * proj.ex + p.y * proj.ey + p.z * proj.ez; }

Point3 orthogonalize(Point3 prev, Point3 raw) {
  const Point3 d = raw - prev;
  if (std::abs(d.x) >= std::abs(d.y) && std::abs(d.x) >= std::abs(d.z)) return {raw.x, prev.y, prev.z};
  if (std::abs(d.y) >= std::abs(d.z)) return {prev.x, raw.y, prev.z};
  return {prev.x, prev.y, raw.z};
}

std::vector<Projection> fly_around(const Projection& start, double step_deg, int n) {
  if (step_deg == 0.0) fail(ErrorCode::kBadStep, "fly-around step must be nonzero");
  if (n < 1) fail(ErrorCode::kInvalidArgument, "fly-around needs at least one step");
  std::vector<Projection> frames;
  frames.reserve(static_cast<std::size_t>(n) + 1);
  frames.push_back(start);
  for (int k = 1; k <= n; ++k) {
    // Viewing the model turned by -theta: x' = x cos + y sin, y' = -x sin + y cos.
    const double theta = deg_to_rad(k * step_deg);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Projection p = start;
    p.ex = c * start.ex - s * start.ey;
    p.ey = s * start.ex + c * start.ey;
    p.name = start.name + "@" + std::to_string(k) + "x" + std::to_string(step_deg);
    frames.push_back(p);
  }
  return frames;
}

std::vector<GlyphArrow> axes_glyph(const Projection& proj) {
  std::vector<GlyphArrow> arrows;
  const std::pair<Vec2, const char*> axes[3] = {{proj.ex, "X"}, {proj.ey, "Y"}, {proj.ez, "Z"}};
  for (const auto& [e, label] : axes) {
    const Vec2 tip = kGlyphLength * e;
    arrows.push_back({{0, 0}, tip, label, tip + kGlyphLabelGap * normalized(e)});
  }
  return arrows;
}

}  // namespace axon
