#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "axon/geometry.hpp"

namespace axon {

// Parallel projection given by the paper-space images of the three model axes.
struct Projection {
  Vec2 ex;
  Vec2 ey;
  Vec2 ez;
  std::string name;

  friend bool operator==(const Projection&, const Projection&) = default;
};

enum class AxisDir { kPosX, kNegX, kPosY, kNegY, kPosZ, kNegZ };

enum class Axis { kX, kY, kZ };

Point3 axis_vector(AxisDir dir);
Axis axis_of(AxisDir dir);
int sign_of(AxisDir dir);
std::string_view axis_dir_name(AxisDir dir);
AxisDir parse_axis_dir(std::string_view text);
std::string_view axis_name(Axis axis);
Axis parse_axis(std::string_view text);
double component(Point3 p, Axis axis);
Point3 unit(Axis axis);

Projection isometric();
Projection frontal_dimetric();
std::vector<Projection> projection_presets();
// Throws UnknownProjection.
Projection projection_by_name(std::string_view name);
// Throws BadProjection when any two basis images are collinear or not finite.
void validate_projection(const Projection& proj);

Vec2 project(Point3 p, const Projection& proj);

// Snaps raw to the coordinate axis carrying the largest component of raw - prev.
// Ties go X before Y before Z.
Point3 orthogonalize(Point3 prev, Point3 raw);

// n + 1 projections; element k shows the model turned by k * step_deg about Z.
std::vector<Projection> fly_around(const Projection& start, double step_deg, int n);

struct GlyphArrow {
  Vec2 from;
  Vec2 to;
  std::string label;
  Vec2 label_at;
};

// Three labeled arrows along the projected axes, 10 mm per model unit vector.
std::vector<GlyphArrow> axes_glyph(const Projection& proj);

}  // namespace axon
