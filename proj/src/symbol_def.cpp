#include "axon/symbol_def.hpp"

#include <cmath>
#include <string>

#include "axon/error.hpp"

namespace axon {

namespace {

constexpr double kPlaneTolerance = 1e-6;
constexpr double kRayDistinctTolerance = 1e-6;

bool well_formed(const Primitive& p) {
  switch (p.kind) {
    case PrimitiveKind::kSegment:
    case PrimitiveKind::kRectangle: return p.points.size() == 2 && p.points[0] != p.points[1];
    case PrimitiveKind::kPolyline: return p.points.size() >= 2;
    case PrimitiveKind::kFilledPolyline:
    case PrimitiveKind::kPolygon: return p.points.size() >= 3;
    case PrimitiveKind::kCircle: return p.points.size() == 1 && p.radius > 0.0;
    case PrimitiveKind::kArc: return p.points.size() == 1 && p.radius > 0.0 && p.start_deg != p.end_deg;
    default: return false;
  }
}

}  // namespace

std::string_view symbol_violation_name(SymbolViolation v) {
  switch (v) {
    case SymbolViolation::kEmptyGeometry: return "EmptyGeometry";
    case SymbolViolation::kForbiddenPrimitive: return "ForbiddenPrimitive";
    case SymbolViolation::kBadPrimitive: return "BadPrimitive";
    case SymbolViolation::kForbiddenAttachmentKind: return "ForbiddenAttachmentKind";
    case SymbolViolation::kBadRays: return "BadRays";
    case SymbolViolation::kBadCut: return "BadCut";
  }
  return "";
}

std::string_view primitive_kind_name(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::kSegment: return "segment";
    case PrimitiveKind::kRectangle: return "rectangle";
    case PrimitiveKind::kPolyline: return "polyline";
    case PrimitiveKind::kFilledPolyline: return "filledPolyline";
    case PrimitiveKind::kCircle: return "circle";
    case PrimitiveKind::kArc: return "arc";
    case PrimitiveKind::kPolygon: return "polygon";
    case PrimitiveKind::kPoint: return "point";
    case PrimitiveKind::kText: return "text";
  }
  return "";
}

PrimitiveKind parse_primitive_kind(std::string_view text) {
  for (PrimitiveKind k : {PrimitiveKind::kSegment, PrimitiveKind::kRectangle, PrimitiveKind::kPolyline,
                          PrimitiveKind::kFilledPolyline, PrimitiveKind::kCircle, PrimitiveKind::kArc,
                          PrimitiveKind::kPolygon, PrimitiveKind::kPoint, PrimitiveKind::kText}) {
    if (text == primitive_kind_name(k)) return k;
  }
  fail(ErrorCode::kParseError, "unknown primitive kind '" + std::string(text) + "'");
}

std::string_view attachment_kind_name(AttachmentKind kind) {
  switch (kind) {
    case AttachmentKind::kAxial: return "axial";
    case AttachmentKind::kAngular: return "angular";
    case AttachmentKind::kTee: return "tee";
    case AttachmentKind::kPoint: return "point";
  }
  return "";
}

AttachmentKind parse_attachment_kind(std::string_view text) {
  for (AttachmentKind k :
       {AttachmentKind::kAxial, AttachmentKind::kAngular, AttachmentKind::kTee, AttachmentKind::kPoint}) {
    if (text == attachment_kind_name(k)) return k;
  }
  fail(ErrorCode::kParseError, "unknown attachment kind '" + std::string(text) + "'");
}

std::vector<SymbolViolation> validate_symbol(const SymbolDef& def) {
  std::vector<SymbolViolation> out;
  if (def.primitives.empty()) out.push_back(SymbolViolation::kEmptyGeometry);

  bool forbidden = false;
  bool malformed = false;
  for (const Primitive& p : def.primitives) {
    if (p.kind == PrimitiveKind::kPoint || p.kind == PrimitiveKind::kText) {
      forbidden = true;
    } else if (!well_formed(p)) {
      malformed = true;
    }
    for (Vec2 q : p.points) {
      if (!is_finite(q)) malformed = true;
    }
  }
  if (forbidden) out.push_back(SymbolViolation::kForbiddenPrimitive);
  if (malformed) out.push_back(SymbolViolation::kBadPrimitive);

  const AttachmentSpec& at = def.attachment;
  if (at.kind == AttachmentKind::kPoint) {
    out.push_back(SymbolViolation::kForbiddenAttachmentKind);
    return out;
  }

  if (at.kind == AttachmentKind::kAxial) {
    if (!at.rays.empty()) out.push_back(SymbolViolation::kBadRays);
    if (at.cut_length && !(*at.cut_length >= 0.0 && std::isfinite(*at.cut_length))) {
      out.push_back(SymbolViolation::kBadCut);
    }
    return out;
  }

  // The cut on angular and tee attachments is fixed by the rays themselves.
  if (at.cut_length) out.push_back(SymbolViolation::kBadCut);
  bool rays_ok = static_cast<int>(at.rays.size()) == attachment_arity(at);
  for (std::size_t i = 0; rays_ok && i < at.rays.size(); ++i) {
    const Ray& r = at.rays[i];
    if (!is_finite(r.dir) || norm(r.dir) == 0.0 || !(r.length > 0.0)) rays_ok = false;
    for (std::size_t j = 0; rays_ok && j < i; ++j) {
      if (distance(normalized(r.dir), normalized(at.rays[j].dir)) <= kRayDistinctTolerance) rays_ok = false;
    }
  }
  if (!rays_ok) out.push_back(SymbolViolation::kBadRays);
  return out;
}

int attachment_arity(const AttachmentSpec& spec) {
  switch (spec.kind) {
    case AttachmentKind::kAxial: return 1;
    case AttachmentKind::kAngular: return 2;
    case AttachmentKind::kTee: return 3;
    case AttachmentKind::kPoint: return 0;
  }
  return 0;
}

Vec2 slot_direction(const SymbolDef& def, int slot) {
  if (def.attachment.kind == AttachmentKind::kAxial) return {1.0, 0.0};
  return normalized(def.attachment.rays.at(static_cast<std::size_t>(slot)).dir);
}

double slot_length(const SymbolDef& def, int slot) {
  if (def.attachment.kind == AttachmentKind::kAxial) return 0.0;
  return def.attachment.rays.at(static_cast<std::size_t>(slot)).length;
}

Vec3 to_model(const Frame& frame, Vec2 local) { return local.x * frame.u + local.y * frame.v; }

bool is_orthonormal(const Frame& f, double tol) {
  return std::abs(norm(f.u) - 1.0) <= tol && std::abs(norm(f.v) - 1.0) <= tol &&
         std::abs(norm(f.n) - 1.0) <= tol && std::abs(dot(f.u, f.v)) <= tol && std::abs(dot(f.u, f.n)) <= tol &&
         std::abs(dot(f.v, f.n)) <= tol;
}

std::vector<OrientationVariant> enumerate_orientations(const SymbolDef& def, std::span<const Vec3> pipe_axes) {
  if (pipe_axes.empty()) fail(ErrorCode::kDegenerateAxis, "no pipe axis given");
  for (Vec3 a : pipe_axes) {
    if (!is_finite(a) || norm(a) <= kPlaneTolerance) fail(ErrorCode::kDegenerateAxis, "degenerate pipe axis");
  }
  const Vec3 u = normalized(pipe_axes[0]);

  std::vector<OrientationVariant> out;
  for (Axis axis : {Axis::kX, Axis::kY, Axis::kZ}) {
    const Vec3 e = unit(axis);
    const Vec3 c = cross(u, e);
    if (norm(c) <= kPlaneTolerance) continue;
    const Vec3 n0 = normalized(c);
    bool holds_all = true;
    for (std::size_t i = 1; i < pipe_axes.size(); ++i) {
      if (std::abs(dot(normalized(pipe_axes[i]), n0)) > kPlaneTolerance) holds_all = false;
    }
    if (!holds_all) continue;
    const Vec3 v0 = normalized(e - dot(e, u) * u);

    for (bool rotated : {false, true}) {
      if (rotated && def.symmetric_about_axis) continue;
      for (bool mirrored : {false, true}) {
        if (mirrored && def.symmetric_about_normal) continue;
        Frame f;
        f.u = mirrored ? -u : u;
        f.v = rotated ? -v0 : v0;
        f.n = cross(f.u, f.v);
        out.push_back({f, axis, rotated, mirrored});
      }
    }
  }
  return out;
}

namespace {

Primitive seg(Vec2 a, Vec2 b) { return {PrimitiveKind::kSegment, {a, b}}; }
Primitive poly(PrimitiveKind kind, std::vector<Vec2> pts) { return {kind, std::move(pts)}; }
Primitive circle(Vec2 c, double r) { return {PrimitiveKind::kCircle, {c}, r}; }
Primitive arc(Vec2 c, double r, double a0, double a1) { return {PrimitiveKind::kArc, {c}, r, a0, a1}; }

SymbolDef axial(std::string name, std::vector<Primitive> prims, double cut, bool sym_axis, bool sym_normal) {
  SymbolDef d;
  d.name = std::move(name);
  d.primitives = std::move(prims);
  d.attachment.kind = AttachmentKind::kAxial;
  d.attachment.cut_length = cut;
  d.symmetric_about_axis = sym_axis;
  d.symmetric_about_normal = sym_normal;
  return d;
}

}  // namespace

// Standard fittings and valves, sized in model millimeters.
Library builtin_library() {
  Library lib;
  lib.name = "standard";
  auto add = [&lib](SymbolDef d) { lib.symbols.emplace(d.name, std::move(d)); };

  const std::vector<Vec2> left = {{-80, -50}, {0, 0}, {-80, 50}};
  const std::vector<Vec2> right = {{80, -50}, {0, 0}, {80, 50}};

  add(axial("gate_valve",
            {poly(PrimitiveKind::kFilledPolyline, left), poly(PrimitiveKind::kFilledPolyline, right)}, 160.0,
            true, true));
  add(axial("ball_valve",
            {poly(PrimitiveKind::kPolygon, left), poly(PrimitiveKind::kPolygon, right), circle({0, 0}, 25.0)},
            160.0, true, true));
  add(axial("check_valve",
            {poly(PrimitiveKind::kFilledPolyline, left), poly(PrimitiveKind::kPolygon, right),
             seg({0, 0}, {0, 60})},
            160.0, false, false));
  add(axial("flange", {seg({-10, -60}, {-10, 60}), seg({10, -60}, {10, 60})}, 20.0, true, true));
  add(axial("reducer", {poly(PrimitiveKind::kPolygon, {{-60, -50}, {60, -25}, {60, 25}, {-60, 50}})}, 120.0,
            true, false));

  SymbolDef elbow;
  elbow.name = "elbow";
  elbow.primitives = {arc({100, 100}, 100.0, 180.0, 270.0)};
  elbow.attachment.kind = AttachmentKind::kAngular;
  elbow.attachment.rays = {{{1, 0}, 100.0}, {{0, 1}, 100.0}};
  add(elbow);

  SymbolDef tee;
  tee.name = "tee";
  tee.primitives = {seg({-100, 0}, {100, 0}), seg({0, 0}, {0, 100}), circle({0, 0}, 15.0)};
  tee.attachment.kind = AttachmentKind::kTee;
  tee.attachment.rays = {{{1, 0}, 100.0}, {{-1, 0}, 100.0}, {{0, 1}, 100.0}};
  tee.symmetric_about_normal = true;
  add(tee);

  return lib;
}

}  // namespace axon
