#include "axon/render.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "axon/annotate.hpp"
#include "axon/error.hpp"
#include "axon/format.hpp"

namespace axon {

namespace {

constexpr double kBreakTrim = 1.0;
constexpr double kBreakStroke = 3.0;
constexpr double kBreakSpacing = 1.5;
constexpr double kBreakAngle = 60.0;
constexpr double kTick = 3.0;
constexpr double kExtensionGap = 1.0;
constexpr double kExtensionOvershoot = 2.0;
constexpr double kMarkLeg = 2.0;
constexpr double kBubbleRadius = 4.0;
constexpr double kGridOverhang = 1000.0;
constexpr double kGlyphInset = 15.0;
constexpr double kArrowHead = 2.0;
constexpr double kMargin = 10.0;
constexpr int kCircleSegments = 48;

Vec2 rotate(Vec2 v, double deg) {
  const double a = deg_to_rad(deg);
  return {v.x * std::cos(a) - v.y * std::sin(a), v.x * std::sin(a) + v.y * std::cos(a)};
}

// Approximate advance of a text run for shelf lengths.
double text_width(const std::string& text, double height) {
  std::size_t glyphs = 0;
  for (unsigned char c : text) glyphs += (c & 0xC0) != 0x80;
  return 0.6 * height * static_cast<double>(glyphs);
}

double baseline_angle(Vec2 dir) {
  double deg = rad_to_deg(std::atan2(dir.y, dir.x));
  if (deg > 90.0) deg -= 180.0;
  if (deg <= -90.0) deg += 180.0;
  return deg;
}

Vec3 frame_point(const BlockInstance& b, Vec2 local) { return b.position + b.scale * to_model(b.frame, local); }

}  // namespace

std::string_view style_name(Style style) {
  switch (style) {
    case Style::kGrid: return "grid";
    case Style::kPipe: return "pipe";
    case Style::kBlock: return "block";
    case Style::kDimension: return "dimension";
    case Style::kLeader: return "leader";
    case Style::kGlyph: return "glyph";
    case Style::kPreview: return "preview";
  }
  return "pipe";
}

void validate_render_settings(const RenderSettings& s) {
  for (double w : {s.pipe_width, s.block_width, s.annotation_width, s.grid_width, s.text_height}) {
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorCode::kInvalidArgument, "stroke widths and text height must be positive");
  }
  if (s.projection) validate_projection(*s.projection);
}

// ---- offsets ----

OffsetField::OffsetField(const Scheme& scheme, const Projection& proj) : scheme_(scheme) {
  for (const auto& [id, o] : scheme.offsets) {
    const Pipe& anchor = scheme.pipe(o.anchor.pipe);
    Region r;
    r.id = id;
    r.local = o.kind == OffsetKind::kLocal;
    r.origin = anchor.at(o.anchor.t);
    r.normal = static_cast<double>(o.half_space_sign) * anchor.direction();
    r.shift = o.paper_shift;
    (void)proj;
    if (r.local) {
      for (const auto& bp : o.broken_pipes) r.broken[bp.pipe] = bp.t;
      auto node_of_end = [&r](PipeEndRef e) {
        return std::make_pair(e.pipe, r.broken.count(e.pipe) ? (e.end == End::kA ? 1 : 2) : 0);
      };
      std::deque<std::pair<ObjectId, int>> queue;
      if (o.scope_pipe && scheme.pipes.count(*o.scope_pipe)) {
        const Pipe& sp = scheme.pipe(*o.scope_pipe);
        int piece = 0;
        if (r.broken.count(sp.id)) piece = inside(r, sp.b) ? 2 : 1;
        queue.emplace_back(sp.id, piece);
        r.scope.insert(queue.back());
      }
      while (!queue.empty()) {
        const auto [pipe, piece] = queue.front();
        queue.pop_front();
        for (End e : {End::kA, End::kB}) {
          if ((piece == 1 && e == End::kB) || (piece == 2 && e == End::kA)) continue;
          for (ObjectId cid : connections_at(scheme, {pipe, e})) {
            const auto next = node_of_end(scheme.connections.at(cid).other({pipe, e}));
            if (r.scope.insert(next).second) queue.push_back(next);
          }
        }
      }
    }
    regions_.push_back(std::move(r));
  }
}

bool OffsetField::inside(const Region& r, Point3 p) const { return dot(p - r.origin, r.normal) > kEpsilon; }

Vec2 OffsetField::on_pipe(ObjectId pipe, double t, std::optional<double> side_t) const {
  const Pipe& p = scheme_.pipe(pipe);
  const Point3 at = p.at(t);
  Vec2 total;
  for (const Region& r : regions_) {
    if (!r.local) {
      if (inside(r, at)) total = total + r.shift;
      continue;
    }
    if (auto it = r.broken.find(pipe); it != r.broken.end()) {
      const int piece = side_t.value_or(t) < it->second ? 1 : 2;
      if (r.scope.count({pipe, piece}) && inside(r, piece == 1 ? p.a : p.b)) total = total + r.shift;
    } else if (r.scope.count({pipe, 0}) && inside(r, at)) {
      total = total + r.shift;
    }
  }
  return total;
}

Vec2 OffsetField::of_block(const BlockInstance& b) const {
  if (b.attachments.empty()) {
    Vec2 total;
    for (const Region& r : regions_) {
      if (!r.local && inside(r, b.position)) total = total + r.shift;
    }
    return total;
  }
  const Pipe& host = scheme_.pipe(b.attachments.front().pipe);
  return on_pipe(host.id, std::clamp(project_parameter(host.a, host.b, b.position), 0.0, 1.0));
}

Vec2 OffsetField::of_target(const LeaderTarget& target) const {
  if (const auto* pp = std::get_if<PipePoint>(&target)) return on_pipe(pp->pipe, pp->t);
  return of_block(scheme_.block(std::get<BlockRef>(target).block));
}

Vec2 OffsetField::of_origin(const DimOrigin& origin) const {
  if (const auto* e = std::get_if<PipeEndRef>(&origin)) return on_pipe(e->pipe, e->end == End::kA ? 0.0 : 1.0);
  return of_block(scheme_.block(std::get<BlockPointRef>(origin).block));
}

std::vector<OffsetField::Break> OffsetField::breaks_on(ObjectId pipe) const {
  std::vector<Break> out;
  for (const Region& r : regions_) {
    if (auto it = r.broken.find(pipe); it != r.broken.end()) out.push_back({r.id, it->second});
  }
  std::sort(out.begin(), out.end(), [](const Break& a, const Break& b) { return a.t < b.t; });
  return out;
}

// ---- drawing ----

namespace {

class Renderer {
 public:
  Renderer(const Scheme& s, const RenderSettings& settings)
      : s_(s),
        settings_(settings),
        proj_(settings.projection.value_or(s.settings.projection)),
        field_(s, proj_),
        origin_(s.settings.placement_origin) {
    visibility_ = s.settings.visibility;
    for (const auto& [c, v] : settings.visibility) visibility_[c] = v;
  }

  Drawable run() {
    if (visible(ObjectClass::kGrid)) grids();
    if (visible(ObjectClass::kPipe)) pipes();
    if (visible(ObjectClass::kOffset)) breaks();
    if (visible(ObjectClass::kBlock)) blocks();
    if (visible(ObjectClass::kDimension)) dimensions();
    if (visible(ObjectClass::kText)) texts();
    if (visible(ObjectClass::kDesignator)) designators();
    if (visible(ObjectClass::kHeightMark)) marks();
    decorations();
    return std::move(out_);
  }

 private:
  bool visible(ObjectClass c) const {
    auto it = visibility_.find(c);
    return it == visibility_.end() || it->second;
  }

  Vec2 paper(Point3 p) const { return project(p, proj_) + origin_; }

  DrawPrimitive& emit(Shape shape, Style style, std::string role, std::vector<Vec2> pts, ObjectId source,
                      std::optional<ObjectClass> cls) {
    DrawPrimitive d;
    d.shape = shape;
    d.style = style;
    d.role = std::move(role);
    d.points = std::move(pts);
    d.source = source;
    d.source_class = cls;
    out_.items.push_back(std::move(d));
    return out_.items.back();
  }

  DrawPrimitive& line(Style style, std::string role, Vec2 a, Vec2 b, ObjectId source, std::optional<ObjectClass> cls) {
    return emit(Shape::kLine, style, std::move(role), {a, b}, source, cls);
  }

  DrawPrimitive& text(Style style, std::string role, Vec2 at, std::string body, ObjectId source,
                      std::optional<ObjectClass> cls, std::string anchor = "start", double angle = 0.0) {
    DrawPrimitive& d = emit(Shape::kText, style, std::move(role), {at}, source, cls);
    d.text = std::move(body);
    d.text_height = settings_.text_height;
    d.anchor = std::move(anchor);
    d.angle_deg = angle;
    return d;
  }

  // Visible parameter ranges of a pipe: [0, 1] minus block cuts, split at breaks.
  struct Span {
    double t0;
    double t1;
  };

  std::vector<Span> visible_spans(ObjectId pipe) const {
    std::vector<Span> spans{{0.0, 1.0}};
    for (const CutInterval& c : cuts_on_pipe(s_, pipe)) {
      std::vector<Span> next;
      for (const Span& sp : spans) {
        if (c.t1 <= sp.t0 || c.t0 >= sp.t1) {
          next.push_back(sp);
          continue;
        }
        if (c.t0 > sp.t0) next.push_back({sp.t0, c.t0});
        if (c.t1 < sp.t1) next.push_back({c.t1, sp.t1});
      }
      spans = std::move(next);
    }
    return spans;
  }

  void pipes() {
    for (const auto& [id, p] : s_.pipes) {
      if (!p.visible) continue;
      const double image = distance(paper(p.a), paper(p.b));
      const double trim = image > 0.0 ? kBreakTrim / image : 0.0;
      std::vector<Span> spans = visible_spans(id);
      for (const auto& br : field_.breaks_on(id)) {
        std::vector<Span> next;
        for (const Span& sp : spans) {
          if (br.t <= sp.t0 || br.t >= sp.t1) {
            next.push_back(sp);
            continue;
          }
          if (br.t - trim > sp.t0) next.push_back({sp.t0, br.t - trim});
          if (br.t + trim < sp.t1) next.push_back({br.t + trim, sp.t1});
        }
        spans = std::move(next);
      }
      for (const Span& sp : spans) {
        const double mid = (sp.t0 + sp.t1) / 2.0;
        const Vec2 a = paper(p.at(sp.t0)) + field_.on_pipe(id, sp.t0, mid);
        const Vec2 b = paper(p.at(sp.t1)) + field_.on_pipe(id, sp.t1, mid);
        line(Style::kPipe, "body", a, b, id, ObjectClass::kPipe);
      }
    }
  }

  void breaks() {
    for (const auto& [id, p] : s_.pipes) {
      const Vec2 pa = paper(p.a);
      const Vec2 pb = paper(p.b);
      const double image = distance(pa, pb);
      if (image <= 0.0) continue;
      const Vec2 dir = normalized(pb - pa);
      const double trim = kBreakTrim / image;
      for (const auto& br : field_.breaks_on(id)) {
        for (int side : {-1, 1}) {
          const double t = br.t + side * trim;
          const Vec2 end = paper(p.at(t)) + field_.on_pipe(id, t, br.t + side * 2.0 * trim);
          const Vec2 stroke = 0.5 * kBreakStroke * rotate(dir, kBreakAngle);
          for (double back : {0.0, kBreakSpacing}) {
            const Vec2 c = end + (side * back) * dir;
            line(Style::kPipe, "break", c - stroke, c + stroke, br.offset, ObjectClass::kOffset);
          }
        }
      }
    }
  }

  void blocks() {
    for (const auto& [id, b] : s_.blocks) {
      const SymbolDef& def = s_.symbol_of(b);
      const Vec2 shift = field_.of_block(b);
      auto map = [&](Vec2 local) { return paper(frame_point(b, local)) + shift; };
      for (const Primitive& prim : def.primitives) {
        std::vector<Vec2> pts;
        Shape shape = Shape::kPolyline;
        bool filled = false;
        switch (prim.kind) {
          case PrimitiveKind::kSegment:
            shape = Shape::kLine;
            for (Vec2 q : prim.points) pts.push_back(map(q));
            break;
          case PrimitiveKind::kPolyline:
            for (Vec2 q : prim.points) pts.push_back(map(q));
            break;
          case PrimitiveKind::kFilledPolyline:
            shape = Shape::kPolygon;
            filled = true;
            for (Vec2 q : prim.points) pts.push_back(map(q));
            break;
          case PrimitiveKind::kPolygon:
            shape = Shape::kPolygon;
            for (Vec2 q : prim.points) pts.push_back(map(q));
            break;
          case PrimitiveKind::kRectangle: {
            shape = Shape::kPolygon;
            const Vec2 a = prim.points.at(0);
            const Vec2 c = prim.points.at(1);
            for (Vec2 q : {a, Vec2{c.x, a.y}, c, Vec2{a.x, c.y}}) pts.push_back(map(q));
            break;
          }
          case PrimitiveKind::kCircle:
            shape = Shape::kPolygon;
            for (int k = 0; k < kCircleSegments; ++k) {
              const double a = 2.0 * kPi * k / kCircleSegments;
              pts.push_back(map(prim.points.at(0) + prim.radius * Vec2{std::cos(a), std::sin(a)}));
            }
            break;
          case PrimitiveKind::kArc: {
            double sweep = prim.end_deg - prim.start_deg;
            while (sweep <= 0.0) sweep += 360.0;
            const int n = std::max(4, static_cast<int>(std::ceil(sweep / 360.0 * kCircleSegments)));
            for (int k = 0; k <= n; ++k) {
              const double a = deg_to_rad(prim.start_deg + sweep * k / n);
              pts.push_back(map(prim.points.at(0) + prim.radius * Vec2{std::cos(a), std::sin(a)}));
            }
            break;
          }
          case PrimitiveKind::kPoint:
          case PrimitiveKind::kText:
            continue;
        }
        emit(shape, Style::kBlock, "symbol", std::move(pts), id, ObjectClass::kBlock).filled = filled;
      }
    }
  }

  static Axis extension_axis(Axis a) { return a == Axis::kY ? Axis::kX : Axis::kY; }

  void dimensions() {
    for (const auto& [id, d] : s_.dimensions) {
      const Vec2 m = normalized(project(unit(d.axis), proj_));
      const Vec2 e = static_cast<double>(d.side) * normalized(project(unit(extension_axis(d.axis)), proj_));
      const double em = cross(e, m);
      if (std::abs(em) < 1e-12) continue;
      std::vector<std::pair<double, Vec2>> pts;  // model coordinate along the axis, paper point
      for (const auto& o : d.origins) {
        const Point3 mp = origin_point(s_, o);
        pts.emplace_back(component(mp, d.axis), paper(mp) + field_.of_origin(o));
      }
      std::stable_sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      double reach = -std::numeric_limits<double>::infinity();
      for (const auto& [_, p] : pts) reach = std::max(reach, cross(p, m) / em);
      std::vector<Vec2> feet;
      for (const auto& [_, p] : pts) {
        const double lambda = reach - cross(p, m) / em + d.offset;
        const Vec2 foot = p + lambda * e;
        feet.push_back(foot);
        line(Style::kDimension, "extension", p + kExtensionGap * e, foot + kExtensionOvershoot * e, id,
             ObjectClass::kDimension);
      }
      auto along = [&m](Vec2 p) { return dot(p, m); };
      const auto [lo, hi] = std::minmax_element(feet.begin(), feet.end(),
                                                [&](Vec2 x, Vec2 y) { return along(x) < along(y); });
      line(Style::kDimension, "dimline", *lo, *hi, id, ObjectClass::kDimension);
      const Vec2 tick = 0.5 * kTick * rotate(m, 45.0);
      for (Vec2 f : feet) line(Style::kDimension, "tick", f - tick, f + tick, id, ObjectClass::kDimension);
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 mid = 0.5 * (feet[i - 1] + feet[i]) + kExtensionGap * e;
        text(Style::kDimension, "value", mid, format_fixed(pts[i].first - pts[i - 1].first, 0), id,
             ObjectClass::kDimension, "middle", baseline_angle(m));
      }
    }
  }

  void leader_group(ObjectId id, ObjectClass cls, const std::vector<Leader>& leaders, int main,
                    const std::string& body) {
    if (leaders.empty()) return;
    const int mi = std::clamp(main, 0, static_cast<int>(leaders.size()) - 1);
    const Vec2 moved = field_.of_target(leaders[mi].target);
    for (std::size_t i = 0; i < leaders.size(); ++i) {
      const Vec2 anchor = leaders[i].anchor + origin_ + moved;
      const Vec2 tip = paper(target_point(s_, leaders[i].target)) + field_.of_target(leaders[i].target);
      line(Style::kLeader, "leader", anchor, tip, id, cls);
    }
    const Vec2 anchor = leaders[mi].anchor + origin_ + moved;
    const double width = text_width(body, settings_.text_height) + 1.0;
    line(Style::kLeader, "shelf", anchor, anchor + Vec2{width, 0.0}, id, cls);
    text(Style::kLeader, "text", anchor + Vec2{0.5, 0.8}, body, id, cls);
  }

  void texts() {
    for (const auto& [id, t] : s_.texts) leader_group(id, ObjectClass::kText, t.leaders, t.main_leader, t.text);
  }

  void designators() {
    for (const auto& [id, pd] : s_.designators) {
      std::string body;
      for (std::size_t i = 0; i < pd.positions.size(); ++i) body += (i ? ", " : "") + std::to_string(pd.positions[i]);
      leader_group(id, ObjectClass::kDesignator, pd.leaders, pd.main_leader, body);
    }
  }

  void marks() {
    for (const auto& [id, h] : s_.height_marks) {
      const Vec2 p = paper(point_at(s_, h.at)) + field_.on_pipe(h.at.pipe, h.at.t);
      std::string body = format_fixed(h.level, 3);
      if (body == "0.000") {
        body = "\xC2\xB1" + body;
      } else if (h.level > 0.0) {
        body = "+" + body;
      }
      const Vec2 left = p + Vec2{-kMarkLeg, kMarkLeg};
      const Vec2 right = p + Vec2{kMarkLeg, kMarkLeg};
      line(Style::kLeader, "mark", p, left, id, ObjectClass::kHeightMark);
      line(Style::kLeader, "mark", p, right, id, ObjectClass::kHeightMark);
      line(Style::kLeader, "shelf", left, right + Vec2{text_width(body, settings_.text_height), 0.0}, id,
           ObjectClass::kHeightMark);
      text(Style::kLeader, "text", p + Vec2{0.0, kMarkLeg + 0.8}, body, id, ObjectClass::kHeightMark);
    }
  }

  void grids() {
    if (s_.grids.empty()) return;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto grow = [&](double x, double y) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    };
    for (const auto& [_, p] : s_.pipes) {
      grow(p.a.x, p.a.y);
      grow(p.b.x, p.b.y);
    }
    for (const auto& [_, g] : s_.grids) {
      for (const auto& a : g.axes) {
        if (a.family == GridFamily::kLetters) {
          grow(std::isfinite(x0) ? x0 : 0.0, a.offset);
        } else {
          grow(a.offset, std::isfinite(y0) ? y0 : 0.0);
        }
      }
    }
    x0 -= kGridOverhang;
    x1 += kGridOverhang;
    y0 -= kGridOverhang;
    y1 += kGridOverhang;
    for (const auto& [id, g] : s_.grids) {
      for (const auto& a : g.axes) {
        const bool letters = a.family == GridFamily::kLetters;
        const Vec2 from = paper(letters ? Point3{x0, a.offset, 0} : Point3{a.offset, y0, 0});
        const Vec2 to = paper(letters ? Point3{x1, a.offset, 0} : Point3{a.offset, y1, 0});
        line(Style::kGrid, "axis", from, to, id, ObjectClass::kGrid);
        const Vec2 centre = from - kBubbleRadius * normalized(to - from);
        DrawPrimitive& c = emit(Shape::kCircle, Style::kGrid, "bubble", {centre}, id, ObjectClass::kGrid);
        c.radius = kBubbleRadius;
        text(Style::kGrid, "label", centre - Vec2{0.0, 0.35 * settings_.text_height}, a.label, id,
             ObjectClass::kGrid, "middle");
      }
    }
  }

  void decorations() {
    const std::string floor = settings_.floor_label.value_or(s_.settings.floor_label);
    if (!settings_.axes_glyph && floor.empty()) return;
    double x0 = 0.0, y1 = 0.0;
    bool any = false;
    for (const auto& d : out_.items) {
      for (Vec2 p : d.points) {
        x0 = any ? std::min(x0, p.x - d.radius) : p.x - d.radius;
        y1 = any ? std::max(y1, p.y + d.radius) : p.y + d.radius;
        any = true;
      }
    }
    if (!any) {
      x0 = origin_.x;
      y1 = origin_.y;
    }
    const Vec2 g{x0 - kGlyphInset, y1 + kGlyphInset};
    if (settings_.axes_glyph) {
      for (const GlyphArrow& a : axes_glyph(proj_)) {
        const Vec2 from = g + a.from;
        const Vec2 to = g + a.to;
        line(Style::kGlyph, "arrow", from, to, 0, std::nullopt);
        const Vec2 back = -kArrowHead * normalized(a.to - a.from);
        line(Style::kGlyph, "head", to, to + rotate(back, 20.0), 0, std::nullopt);
        line(Style::kGlyph, "head", to, to + rotate(back, -20.0), 0, std::nullopt);
        text(Style::kGlyph, "label", g + a.label_at, a.label, 0, std::nullopt, "middle");
      }
    }
    if (!floor.empty()) {
      text(Style::kGlyph, "floor", g + Vec2{settings_.axes_glyph ? 2.0 * kGlyphInset : 0.0, 0.0}, floor, 0,
           std::nullopt);
    }
  }

  const Scheme& s_;
  const RenderSettings& settings_;
  Projection proj_;
  OffsetField field_;
  Vec2 origin_;
  std::map<ObjectClass, bool> visibility_;
  Drawable out_;
};

}  // namespace

Drawable render(const Scheme& scheme, const RenderSettings& settings) {
  validate_render_settings(settings);
  return Renderer(scheme, settings).run();
}

Drawable render_preview(const Scheme& base, const Scheme& staged, const IdSet& pending,
                        const RenderSettings& settings) {
  Drawable out = render(base, settings);
  if (pending.empty()) return out;
  // Pending objects missing from the staged scheme are about to go away.
  for (DrawPrimitive& d : out.items) {
    if (pending.count(d.source) && !staged.contains(d.source)) d.style = Style::kPreview;
  }
  RenderSettings quiet = settings;
  quiet.axes_glyph = false;
  quiet.floor_label = "";
  for (DrawPrimitive d : render(staged, quiet).items) {
    if (!pending.count(d.source)) continue;
    d.style = Style::kPreview;
    out.items.push_back(std::move(d));
  }
  return out;
}

// ---- SVG ----

namespace {

std::string num(double v) { return format_fixed(v, 3); }

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string point_list(const std::vector<Vec2>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += num(pts[i].x) + ',' + num(-pts[i].y);
  }
  return out;
}

}  // namespace

std::string emit_svg(const Drawable& drawable, const RenderSettings& settings) {
  validate_render_settings(settings);
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool any = false;
  auto grow = [&](double x, double y) {
    if (!any) {
      x0 = x1 = x;
      y0 = y1 = y;
      any = true;
    }
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& d : drawable.items) {
    for (Vec2 p : d.points) {
      grow(p.x - d.radius, p.y - d.radius);
      grow(p.x + d.radius, p.y + d.radius + d.text_height);
    }
  }
  x0 -= kMargin;
  y0 -= kMargin;
  x1 += kMargin;
  y1 += kMargin;
  const double w = x1 - x0;
  const double h = y1 - y0;

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w) << "mm\" height=\"" << num(h)
    << "mm\" viewBox=\"" << num(x0) << ' ' << num(-y1) << ' ' << num(w) << ' ' << num(h) << "\">\n";
  o << "<style>\n"
    << "line,polyline,polygon,circle{fill:none;stroke:#000;stroke-linecap:round;stroke-linejoin:round}\n"
    << ".grid{stroke-width:" << num(settings.grid_width) << ";stroke-dasharray:6,1.5,1,1.5}\n"
    << ".pipe{stroke-width:" << num(settings.pipe_width) << "}\n"
    << ".block{stroke-width:" << num(settings.block_width) << "}\n"
    << ".dimension,.leader,.glyph{stroke-width:" << num(settings.annotation_width) << "}\n"
    << ".preview{stroke:#0070c0;stroke-width:" << num(settings.annotation_width) << ";stroke-dasharray:2,1}\n"
    << ".filled{fill:#000}\n.preview.filled{fill:#0070c0}\n"
    << "text{font-family:sans-serif;fill:#000;stroke:none}\ntext.preview{fill:#0070c0}\n"
    << "</style>\n";
  for (Style style : {Style::kGrid, Style::kPipe, Style::kBlock, Style::kDimension, Style::kLeader, Style::kGlyph,
                      Style::kPreview}) {
    bool opened = false;
    for (const auto& d : drawable.items) {
      if (d.style != style) continue;
      if (!opened) {
        o << "<g id=\"" << style_name(style) << "\">\n";
        opened = true;
      }
      std::string cls = std::string(style_name(style)) + (d.filled ? " filled" : "");
      switch (d.shape) {
        case Shape::kLine:
          o << "<line class=\"" << cls << "\" x1=\"" << num(d.points.at(0).x) << "\" y1=\"" << num(-d.points.at(0).y)
            << "\" x2=\"" << num(d.points.at(1).x) << "\" y2=\"" << num(-d.points.at(1).y) << "\"/>\n";
          break;
        case Shape::kPolyline:
          o << "<polyline class=\"" << cls << "\" points=\"" << point_list(d.points) << "\"/>\n";
          break;
        case Shape::kPolygon:
          o << "<polygon class=\"" << cls << "\" points=\"" << point_list(d.points) << "\"/>\n";
          break;
        case Shape::kCircle:
          o << "<circle class=\"" << cls << "\" cx=\"" << num(d.points.at(0).x) << "\" cy=\"" << num(-d.points.at(0).y)
            << "\" r=\"" << num(d.radius) << "\"/>\n";
          break;
        case Shape::kText: {
          const Vec2 p = d.points.at(0);
          o << "<text class=\"" << cls << "\" x=\"" << num(p.x) << "\" y=\"" << num(-p.y) << "\" font-size=\""
            << num(d.text_height) << "\" text-anchor=\"" << d.anchor << "\"";
          if (d.angle_deg != 0.0) {
            o << " transform=\"rotate(" << num(-d.angle_deg) << ' ' << num(p.x) << ' ' << num(-p.y) << ")\"";
          }
          o << ">" << xml_escape(d.text) << "</text>\n";
          break;
        }
      }
    }
    if (opened) o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---- picking ----

std::string_view pick_kind_name(PickKind kind) {
  switch (kind) {
    case PickKind::kPipe: return "pipe";
    case PickKind::kPipeEnd: return "pipeEnd";
    case PickKind::kBlock: return "block";
    case PickKind::kDimension: return "dimension";
    case PickKind::kText: return "text";
    case PickKind::kDesignator: return "designator";
    case PickKind::kHeightMark: return "heightMark";
  }
  return "pipe";
}

PickKind parse_pick_kind(std::string_view text) {
  for (PickKind k : {PickKind::kPipe, PickKind::kPipeEnd, PickKind::kBlock, PickKind::kDimension, PickKind::kText,
                     PickKind::kDesignator, PickKind::kHeightMark}) {
    if (pick_kind_name(k) == text) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown pick kind '" + std::string(text) + "'");
}

namespace {

double primitive_distance(const DrawPrimitive& d, Vec2 at) {
  double best = std::numeric_limits<double>::infinity();
  switch (d.shape) {
    case Shape::kText:
    case Shape::kCircle:
      return distance(d.points.at(0), at);
    case Shape::kLine:
    case Shape::kPolyline:
    case Shape::kPolygon: {
      const std::size_t n = d.points.size();
      if (n == 1) return distance(d.points[0], at);
      for (std::size_t i = 1; i < n; ++i) best = std::min(best, point_segment_distance(d.points[i - 1], d.points[i], at));
      if (d.shape == Shape::kPolygon && n > 2) best = std::min(best, point_segment_distance(d.points[n - 1], d.points[0], at));
      return best;
    }
  }
  return best;
}

std::optional<PickKind> kind_of(ObjectClass c) {
  switch (c) {
    case ObjectClass::kPipe: return PickKind::kPipe;
    case ObjectClass::kBlock: return PickKind::kBlock;
    case ObjectClass::kDimension: return PickKind::kDimension;
    case ObjectClass::kText: return PickKind::kText;
    case ObjectClass::kDesignator: return PickKind::kDesignator;
    case ObjectClass::kHeightMark: return PickKind::kHeightMark;
    default: return std::nullopt;
  }
}

}  // namespace

std::vector<PickCandidate> pick(const Scheme& scheme, Vec2 at, const Projection& proj, const std::set<PickKind>& filter,
                                double radius) {
  std::vector<PickCandidate> out;
  if (filter.empty()) return out;
  RenderSettings rs;
  rs.projection = proj;
  const Drawable drawing = render(scheme, rs);
  std::map<std::pair<int, ObjectId>, double> best;
  for (const auto& d : drawing.items) {
    if (!d.source_class) continue;
    const auto kind = kind_of(*d.source_class);
    if (!kind || !filter.count(*kind)) continue;
    if (kind == PickKind::kPipe && d.role != "body") continue;
    const double dist = primitive_distance(d, at);
    if (dist > radius) continue;
    auto key = std::make_pair(static_cast<int>(*kind), d.source);
    auto it = best.find(key);
    if (it == best.end() || dist < it->second) best[key] = dist;
  }
  for (const auto& [key, dist] : best) out.push_back({{static_cast<PickKind>(key.first), key.second, End::kA}, dist});

  const bool pipes_visible = [&] {
    auto it = scheme.settings.visibility.find(ObjectClass::kPipe);
    return it == scheme.settings.visibility.end() || it->second;
  }();
  if (filter.count(PickKind::kPipeEnd) && pipes_visible) {
    const OffsetField field(scheme, proj);
    const Vec2 origin = scheme.settings.placement_origin;
    for (const auto& [id, p] : scheme.pipes) {
      if (!p.visible) continue;
      for (End e : {End::kA, End::kB}) {
        const double t = e == End::kA ? 0.0 : 1.0;
        const Vec2 img = project(p.end_point(e), proj) + origin + field.on_pipe(id, t);
        const double dist = distance(img, at);
        if (dist <= radius) out.push_back({{PickKind::kPipeEnd, id, e}, dist});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PickCandidate& a, const PickCandidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.target.kind != b.target.kind) return a.target.kind < b.target.kind;
    if (a.target.id != b.target.id) return a.target.id < b.target.id;
    return a.target.end < b.target.end;
  });
  return out;
}

}  // namespace axon
