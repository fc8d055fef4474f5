#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axon/geometry.hpp"
#include "axon/projection.hpp"
#include "axon/symbol_def.hpp"

namespace axon {

// Ids are allocated from one counter per document and never reused.
using ObjectId = std::uint64_t;
using IdSet = std::set<ObjectId>;

enum class End { kA, kB };

inline End opposite(End e) { return e == End::kA ? End::kB : End::kA; }

struct PipeEndRef {
  ObjectId pipe = 0;
  End end = End::kA;

  friend auto operator<=>(const PipeEndRef&, const PipeEndRef&) = default;
};

// A point along a pipe, t = 0 at end a and t = 1 at end b.
struct PipePoint {
  ObjectId pipe = 0;
  double t = 0.0;

  friend bool operator==(const PipePoint&, const PipePoint&) = default;
};

struct Pipe {
  ObjectId id = 0;
  Point3 a;
  Point3 b;
  bool visible = true;
  std::optional<ObjectId> designator;

  Point3 end_point(End e) const { return e == End::kA ? a : b; }
  Point3 at(double t) const { return lerp(a, b, t); }
  double length() const { return distance(a, b); }
  Vec3 direction() const { return normalized(b - a); }

  friend bool operator==(const Pipe&, const Pipe&) = default;
};

// Unordered pair of pipe ends; stored with first < second.
struct Connection {
  ObjectId id = 0;
  PipeEndRef first;
  PipeEndRef second;

  bool touches(ObjectId pipe) const { return first.pipe == pipe || second.pipe == pipe; }
  bool involves(PipeEndRef e) const { return first == e || second == e; }
  PipeEndRef other(PipeEndRef e) const { return first == e ? second : first; }

  friend bool operator==(const Connection&, const Connection&) = default;
};

struct BlockAttachment {
  ObjectId pipe = 0;
  int slot = 0;

  friend bool operator==(const BlockAttachment&, const BlockAttachment&) = default;
};

// Axial blocks sit on their host pipe; angular and tee blocks sit on the
// shared end point of the pipes they join.
struct BlockInstance {
  ObjectId id = 0;
  std::string symbol;
  Point3 position;
  Frame frame;
  double scale = 1.0;
  std::vector<BlockAttachment> attachments;
  std::optional<ObjectId> designator;

  bool attached_to(ObjectId pipe) const {
    for (const auto& a : attachments) {
      if (a.pipe == pipe) return true;
    }
    return false;
  }

  friend bool operator==(const BlockInstance&, const BlockInstance&) = default;
};

struct BlockPointRef {
  ObjectId block = 0;
  int slot = 0;

  friend bool operator==(const BlockPointRef&, const BlockPointRef&) = default;
};

using DimOrigin = std::variant<PipeEndRef, BlockPointRef>;

struct ChainDimension {
  ObjectId id = 0;
  std::vector<DimOrigin> origins;
  Axis axis = Axis::kX;
  int side = 1;
  double offset = 10.0;  // paper mm from the outermost origin

  friend bool operator==(const ChainDimension&, const ChainDimension&) = default;
};

struct BlockRef {
  ObjectId block = 0;

  friend bool operator==(const BlockRef&, const BlockRef&) = default;
};

using LeaderTarget = std::variant<PipePoint, BlockRef>;

struct Leader {
  LeaderTarget target;
  Vec2 anchor;  // paper-space text anchor, before placement origin

  friend bool operator==(const Leader&, const Leader&) = default;
};

struct TextAnnotation {
  ObjectId id = 0;
  std::string text;
  std::vector<Leader> leaders;
  int main_leader = 0;

  friend bool operator==(const TextAnnotation&, const TextAnnotation&) = default;
};

// Slot roles for the four- and five-position flange kit.
inline constexpr const char* kFlangeRoles[5] = {"block", "studs", "nuts", "washers", "gaskets"};

struct PositionDesignator {
  ObjectId id = 0;
  std::vector<int> positions;
  ObjectId target = 0;  // pipe or block carrying this designator
  std::vector<Leader> leaders;
  int main_leader = 0;

  friend bool operator==(const PositionDesignator&, const PositionDesignator&) = default;
};

struct HeightMark {
  ObjectId id = 0;
  PipePoint at;
  double level = 0.0;  // meters

  friend bool operator==(const HeightMark&, const HeightMark&) = default;
};

enum class OffsetKind { kGlobal, kLocal };

// Render-time displacement of everything past a plane through the anchor,
// normal to the anchor pipe. Sign +1 selects the side toward the pipe's b end.
struct OffsetSpec {
  ObjectId id = 0;
  OffsetKind kind = OffsetKind::kGlobal;
  PipePoint anchor;
  int half_space_sign = 1;
  Vec2 paper_shift;
  std::vector<PipePoint> broken_pipes;  // local only
  std::optional<ObjectId> scope_pipe;   // local only; its branch is the scope

  friend bool operator==(const OffsetSpec&, const OffsetSpec&) = default;
};

enum class GridFamily { kLetters, kNumbers };

struct GridAxis {
  std::string label;
  GridFamily family = GridFamily::kLetters;
  double offset = 0.0;  // letters: y coordinate, numbers: x coordinate

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

struct ConstructionGrid {
  ObjectId id = 0;
  std::vector<GridAxis> axes;

  friend bool operator==(const ConstructionGrid&, const ConstructionGrid&) = default;
};

enum class ObjectClass { kPipe, kConnection, kBlock, kDimension, kText, kDesignator, kHeightMark, kOffset, kGrid };

inline constexpr ObjectClass kAllObjectClasses[] = {
    ObjectClass::kPipe,       ObjectClass::kConnection, ObjectClass::kBlock,
    ObjectClass::kDimension,  ObjectClass::kText,       ObjectClass::kDesignator,
    ObjectClass::kHeightMark, ObjectClass::kOffset,     ObjectClass::kGrid,
};

std::string_view object_class_name(ObjectClass c);
ObjectClass parse_object_class(std::string_view text);

enum class NumberingMode { kAuto, kManual };

struct SchemeSettings {
  Projection projection = isometric();
  std::map<ObjectClass, bool> visibility = default_visibility();
  std::string library = "standard";
  NumberingMode numbering = NumberingMode::kAuto;
  int flange_slots = 4;
  std::string floor_label;
  Vec2 placement_origin;

  static std::map<ObjectClass, bool> default_visibility();

  friend bool operator==(const SchemeSettings&, const SchemeSettings&) = default;
};

struct SpecRow {
  std::string name;
  std::string type_brand;
  std::string code;
  std::string unit;
  std::optional<double> quantity;
  std::string catalog_ref;
  std::map<std::string, std::string> extra;

  // Nothing but position and quantity filled in.
  bool unassigned() const {
    return name.empty() && type_brand.empty() && code.empty() && unit.empty() && catalog_ref.empty() &&
           extra.empty();
  }

  friend bool operator==(const SpecRow&, const SpecRow&) = default;
};

struct Scheme {
  std::map<ObjectId, Pipe> pipes;
  std::map<ObjectId, Connection> connections;
  std::map<ObjectId, BlockInstance> blocks;
  std::map<ObjectId, ChainDimension> dimensions;
  std::map<ObjectId, TextAnnotation> texts;
  std::map<ObjectId, PositionDesignator> designators;
  std::map<ObjectId, HeightMark> height_marks;
  std::map<ObjectId, OffsetSpec> offsets;
  std::map<ObjectId, ConstructionGrid> grids;
  // Definitions of every symbol placed in this document.
  std::map<std::string, SymbolDef> symbols;
  std::map<int, SpecRow> spec;
  SchemeSettings settings;
  ObjectId next_id = 1;

  ObjectId allocate_id() { return next_id++; }

  std::optional<ObjectClass> class_of(ObjectId id) const;
  bool contains(ObjectId id) const { return class_of(id).has_value(); }
  std::size_t object_count() const;
  IdSet all_ids() const;

  // Throw UnknownId.
  const Pipe& pipe(ObjectId id) const;
  Pipe& pipe(ObjectId id);
  const BlockInstance& block(ObjectId id) const;
  BlockInstance& block(ObjectId id);
  const SymbolDef& symbol_of(const BlockInstance& b) const;

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

// ---- queries shared by every module ----

Point3 end_point(const Scheme& s, PipeEndRef e);
Point3 point_at(const Scheme& s, PipePoint p);

std::vector<ObjectId> connections_at(const Scheme& s, PipeEndRef e);
std::vector<ObjectId> connections_of(const Scheme& s, ObjectId pipe);
std::optional<ObjectId> find_connection(const Scheme& s, PipeEndRef e1, PipeEndRef e2);

// Every pipe end within eps of p, ordered by pipe id then end.
std::vector<PipeEndRef> ends_at(const Scheme& s, Point3 p, double eps = kEpsilon);

// Pipes reachable from seed through connections, seed included.
IdSet branch_of(const Scheme& s, ObjectId seed);

// Model point of a leader target or dimension origin.
Point3 target_point(const Scheme& s, const LeaderTarget& t);
Point3 origin_point(const Scheme& s, const DimOrigin& o);

// Point where attachment slot k of a block meets its pipe.
Point3 attachment_point(const Scheme& s, const BlockInstance& b, int slot);

struct CutInterval {
  ObjectId pipe = 0;
  ObjectId block = 0;
  double t0 = 0.0;
  double t1 = 0.0;
};

// Parameter intervals hidden under blocks, derived from block geometry.
std::vector<CutInterval> block_cuts(const Scheme& s, const BlockInstance& b);
std::vector<CutInterval> cuts_on_pipe(const Scheme& s, ObjectId pipe);

// Throws CutCollision when any cut on the pipe leaves [0, 1] or two overlap.
void check_cuts(const Scheme& s, ObjectId pipe);

std::string_view end_name(End e);
End parse_end(std::string_view text);

}  // namespace axon
