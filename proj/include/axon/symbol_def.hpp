#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axon/geometry.hpp"
#include "axon/projection.hpp"

namespace axon {

// Symbol geometry is planar; local coordinates (s, t) are posed in 3D by a
// Frame as position + scale * (s * u + t * v). Point and text primitives are
// representable so that validation can reject them.
enum class PrimitiveKind {
  kSegment,
  kRectangle,
  kPolyline,
  kFilledPolyline,
  kCircle,
  kArc,
  kPolygon,
  kPoint,
  kText,
};

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kSegment;
  std::vector<Vec2> points;  // circle and arc: points[0] is the center
  double radius = 0.0;
  double start_deg = 0.0;  // arc only, counterclockwise from start to end
  double end_deg = 0.0;

  friend bool operator==(const Primitive&, const Primitive&) = default;
};

enum class AttachmentKind { kAxial, kAngular, kTee, kPoint };

// Attachment ray in symbol-local coordinates; the attachment point lies at
// length along dir from the block position.
struct Ray {
  Vec2 dir;
  double length = 0.0;

  friend bool operator==(const Ray&, const Ray&) = default;
};

struct AttachmentSpec {
  AttachmentKind kind = AttachmentKind::kAxial;
  std::optional<double> cut_length;  // axial only, centered on the position
  std::vector<Ray> rays;             // angular: 2, tee: 3

  friend bool operator==(const AttachmentSpec&, const AttachmentSpec&) = default;
};

struct SymbolDef {
  std::string name;
  std::vector<Primitive> primitives;
  AttachmentSpec attachment;
  bool symmetric_about_axis = false;
  bool symmetric_about_normal = false;

  friend bool operator==(const SymbolDef&, const SymbolDef&) = default;
};

struct Library {
  std::string name;
  std::map<std::string, SymbolDef> symbols;

  friend bool operator==(const Library&, const Library&) = default;
};

enum class SymbolViolation {
  kEmptyGeometry,
  kForbiddenPrimitive,
  kBadPrimitive,
  kForbiddenAttachmentKind,
  kBadRays,
  kBadCut,
};

std::string_view symbol_violation_name(SymbolViolation v);
std::string_view primitive_kind_name(PrimitiveKind kind);
PrimitiveKind parse_primitive_kind(std::string_view text);
std::string_view attachment_kind_name(AttachmentKind kind);
AttachmentKind parse_attachment_kind(std::string_view text);

std::vector<SymbolViolation> validate_symbol(const SymbolDef& def);

// 1 for axial, 2 for angular, 3 for tee.
int attachment_arity(const AttachmentSpec& spec);

// Local direction of attachment slot k; axial slot 0 is +s.
Vec2 slot_direction(const SymbolDef& def, int slot);
// Distance from the position to the attachment point of slot k, before scaling.
double slot_length(const SymbolDef& def, int slot);

struct Frame {
  Vec3 u;  // attachment axis
  Vec3 v;  // in-plane normal to u
  Vec3 n;  // plane normal, u x v

  friend bool operator==(const Frame&, const Frame&) = default;
};

Vec3 to_model(const Frame& frame, Vec2 local);
bool is_orthonormal(const Frame& frame, double tol = 1e-9);

struct OrientationVariant {
  Frame frame;
  // Coordinate axis that lies in the block plane and carries its extension line.
  Axis extension_axis = Axis::kX;
  bool rotated = false;   // 180 degrees about u
  bool mirrored = false;  // reflected across the normal to u

  friend bool operator==(const OrientationVariant&, const OrientationVariant&) = default;
};

// Candidate orientations for placing def on pipes with the given axes. The
// first axis is the attachment axis; further axes must lie in the block plane.
// Order: extension axis X, Y, Z, then rotation, then mirror.
std::vector<OrientationVariant> enumerate_orientations(const SymbolDef& def, std::span<const Vec3> pipe_axes);

Library builtin_library();

}  // namespace axon
