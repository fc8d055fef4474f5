#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "axon/edit_ops.hpp"
#include "axon/scheme.hpp"

namespace axon {

enum class Style { kGrid, kPipe, kBlock, kDimension, kLeader, kGlyph, kPreview };

std::string_view style_name(Style style);

enum class Shape { kLine, kPolyline, kPolygon, kCircle, kText };

// Paper-space primitive, y up, in paper mm.
struct DrawPrimitive {
  Shape shape = Shape::kLine;
  Style style = Style::kPipe;
  std::string role;  // body, break, symbol, extension, dimline, tick, value, leader, shelf, text, mark, axis, bubble, arrow, head, label, floor
  std::vector<Vec2> points;
  bool filled = false;
  double radius = 0.0;  // circles
  std::string text;
  double text_height = 0.0;
  double angle_deg = 0.0;  // text baseline direction
  std::string anchor = "start";
  ObjectId source = 0;
  std::optional<ObjectClass> source_class;

  friend bool operator==(const DrawPrimitive&, const DrawPrimitive&) = default;
};

struct Drawable {
  std::vector<DrawPrimitive> items;

  friend bool operator==(const Drawable&, const Drawable&) = default;
};

struct RenderSettings {
  std::optional<Projection> projection;  // the scheme's own when empty
  std::map<ObjectClass, bool> visibility;  // overrides of the scheme settings
  bool axes_glyph = false;
  std::optional<std::string> floor_label;
  double pipe_width = 0.6;
  double block_width = 0.4;
  double annotation_width = 0.25;
  double grid_width = 0.25;
  double text_height = 3.5;
};

// Throws InvalidArgument on nonpositive widths or text height.
void validate_render_settings(const RenderSettings& settings);

// Render-time displacement from every offset in the scheme.
class OffsetField {
 public:
  OffsetField(const Scheme& scheme, const Projection& proj);

  // Shift of the point at t on the pipe; side_t picks the piece of a broken
  // pipe and defaults to t.
  Vec2 on_pipe(ObjectId pipe, double t, std::optional<double> side_t = std::nullopt) const;
  Vec2 of_block(const BlockInstance& block) const;
  Vec2 of_target(const LeaderTarget& target) const;
  Vec2 of_origin(const DimOrigin& origin) const;

  struct Break {
    ObjectId offset;
    double t;
  };
  std::vector<Break> breaks_on(ObjectId pipe) const;

 private:
  struct Region {
    ObjectId id;
    bool local;
    Point3 origin;
    Vec3 normal;  // toward the shifted side
    Vec2 shift;
    std::map<ObjectId, double> broken;
    std::set<std::pair<ObjectId, int>> scope;  // piece 0 whole pipe, 1 a side, 2 b side
  };
  bool inside(const Region& r, Point3 p) const;

  const Scheme& scheme_;
  std::vector<Region> regions_;
};

Drawable render(const Scheme& scheme, const RenderSettings& settings = {});

// Base drawing plus the pending objects of the staged scheme restyled as
// construction previews. Pending objects the staged scheme no longer holds
// are restyled where the base drawing shows them.
Drawable render_preview(const Scheme& base, const Scheme& staged, const IdSet& pending,
                        const RenderSettings& settings = {});

// SVG 1.1 in mm with the view box fitted to the content plus 10 mm.
std::string emit_svg(const Drawable& drawable, const RenderSettings& settings = {});

struct PickCandidate {
  PickTarget target;
  double distance = 0.0;

  friend bool operator==(const PickCandidate& a, const PickCandidate& b) {
    return a.target.kind == b.target.kind && a.target.id == b.target.id && a.target.end == b.target.end &&
           a.distance == b.distance;
  }
};

inline constexpr double kPickRadius = 3.0;

// Visible objects within radius of the paper point, nearest first, ties by
// kind then id.
std::vector<PickCandidate> pick(const Scheme& scheme, Vec2 at, const Projection& proj, const std::set<PickKind>& filter,
                                double radius = kPickRadius);

std::string_view pick_kind_name(PickKind kind);
PickKind parse_pick_kind(std::string_view text);

}  // namespace axon
