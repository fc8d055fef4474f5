#include "axon/scheme.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "axon/error.hpp"

namespace axon {

namespace {

constexpr double kCutTolerance = 1e-9;

template <class Map>
auto& lookup(Map& map, ObjectId id, const char* what) {
  auto it = map.find(id);
  if (it == map.end()) fail(ErrorCode::kUnknownId, std::string("no ") + what + " with id " + std::to_string(id));
  return it->second;
}

}  // namespace

std::string_view object_class_name(ObjectClass c) {
  switch (c) {
    case ObjectClass::kPipe: return "pipe";
    case ObjectClass::kConnection: return "connection";
    case ObjectClass::kBlock: return "block";
    case ObjectClass::kDimension: return "dimension";
    case ObjectClass::kText: return "text";
    case ObjectClass::kDesignator: return "designator";
    case ObjectClass::kHeightMark: return "heightMark";
    case ObjectClass::kOffset: return "offset";
    case ObjectClass::kGrid: return "grid";
  }
  return "";
}

ObjectClass parse_object_class(std::string_view text) {
  for (ObjectClass c : kAllObjectClasses) {
    if (text == object_class_name(c)) return c;
  }
  fail(ErrorCode::kInvalidArgument, "unknown object class '" + std::string(text) + "'");
}

std::map<ObjectClass, bool> SchemeSettings::default_visibility() {
  std::map<ObjectClass, bool> v;
  for (ObjectClass c : kAllObjectClasses) v[c] = true;
  return v;
}

std::optional<ObjectClass> Scheme::class_of(ObjectId id) const {
  if (pipes.count(id)) return ObjectClass::kPipe;
  if (connections.count(id)) return ObjectClass::kConnection;
  if (blocks.count(id)) return ObjectClass::kBlock;
  if (dimensions.count(id)) return ObjectClass::kDimension;
  if (texts.count(id)) return ObjectClass::kText;
  if (designators.count(id)) return ObjectClass::kDesignator;
  if (height_marks.count(id)) return ObjectClass::kHeightMark;
  if (offsets.count(id)) return ObjectClass::kOffset;
  if (grids.count(id)) return ObjectClass::kGrid;
  return std::nullopt;
}

std::size_t Scheme::object_count() const {
  return pipes.size() + connections.size() + blocks.size() + dimensions.size() + texts.size() +
         designators.size() + height_marks.size() + offsets.size() + grids.size();
}

IdSet Scheme::all_ids() const {
  IdSet ids;
  auto add = [&ids](const auto& map) {
    for (const auto& [id, _] : map) ids.insert(id);
  };
  add(pipes);
  add(connections);
  add(blocks);
  add(dimensions);
  add(texts);
  add(designators);
  add(height_marks);
  add(offsets);
  add(grids);
  return ids;
}

const Pipe& Scheme::pipe(ObjectId id) const { return lookup(pipes, id, "pipe"); }
Pipe& Scheme::pipe(ObjectId id) { return lookup(pipes, id, "pipe"); }
const BlockInstance& Scheme::block(ObjectId id) const { return lookup(blocks, id, "block"); }
BlockInstance& Scheme::block(ObjectId id) { return lookup(blocks, id, "block"); }

const SymbolDef& Scheme::symbol_of(const BlockInstance& b) const {
  auto it = symbols.find(b.symbol);
  if (it == symbols.end()) fail(ErrorCode::kUnknownSymbol, "symbol '" + b.symbol + "' is not defined");
  return it->second;
}

Point3 end_point(const Scheme& s, PipeEndRef e) { return s.pipe(e.pipe).end_point(e.end); }

Point3 point_at(const Scheme& s, PipePoint p) { return s.pipe(p.pipe).at(p.t); }

std::vector<ObjectId> connections_at(const Scheme& s, PipeEndRef e) {
  std::vector<ObjectId> out;
  for (const auto& [id, c] : s.connections) {
    if (c.involves(e)) out.push_back(id);
  }
  return out;
}

std::vector<ObjectId> connections_of(const Scheme& s, ObjectId pipe) {
  std::vector<ObjectId> out;
  for (const auto& [id, c] : s.connections) {
    if (c.touches(pipe)) out.push_back(id);
  }
  return out;
}

std::optional<ObjectId> find_connection(const Scheme& s, PipeEndRef e1, PipeEndRef e2) {
  for (const auto& [id, c] : s.connections) {
    if ((c.first == e1 && c.second == e2) || (c.first == e2 && c.second == e1)) return id;
  }
  return std::nullopt;
}

std::vector<PipeEndRef> ends_at(const Scheme& s, Point3 p, double eps) {
  std::vector<PipeEndRef> out;
  for (const auto& [id, pipe] : s.pipes) {
    if (coincident(pipe.a, p, eps)) out.push_back({id, End::kA});
    if (coincident(pipe.b, p, eps)) out.push_back({id, End::kB});
  }
  return out;
}

IdSet branch_of(const Scheme& s, ObjectId seed) {
  s.pipe(seed);
  std::map<ObjectId, std::vector<ObjectId>> adjacency;
  for (const auto& [_, c] : s.connections) {
    adjacency[c.first.pipe].push_back(c.second.pipe);
    adjacency[c.second.pipe].push_back(c.first.pipe);
  }
  IdSet seen = {seed};
  std::deque<ObjectId> queue = {seed};
  while (!queue.empty()) {
    const ObjectId cur = queue.front();
    queue.pop_front();
    for (ObjectId next : adjacency[cur]) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen;
}

Point3 target_point(const Scheme& s, const LeaderTarget& t) {
  if (const auto* pp = std::get_if<PipePoint>(&t)) return point_at(s, *pp);
  return s.block(std::get<BlockRef>(t).block).position;
}

Point3 origin_point(const Scheme& s, const DimOrigin& o) {
  if (const auto* e = std::get_if<PipeEndRef>(&o)) return end_point(s, *e);
  const auto& ref = std::get<BlockPointRef>(o);
  const BlockInstance& b = s.block(ref.block);
  return attachment_point(s, b, ref.slot);
}

namespace {

// End of the pipe nearest to p.
End nearest_end(const Pipe& pipe, Point3 p) { return distance(pipe.a, p) <= distance(pipe.b, p) ? End::kA : End::kB; }

}  // namespace

Point3 attachment_point(const Scheme& s, const BlockInstance& b, int slot) {
  const SymbolDef& def = s.symbol_of(b);
  if (def.attachment.kind == AttachmentKind::kAxial) return b.position;
  const double r = slot_length(def, slot) * b.scale;
  for (const BlockAttachment& at : b.attachments) {
    if (at.slot != slot) continue;
    const Pipe& pipe = s.pipe(at.pipe);
    const End e = nearest_end(pipe, b.position);
    const Point3 start = pipe.end_point(e);
    return start + r * normalized(pipe.end_point(opposite(e)) - start);
  }
  return b.position + r * to_model(b.frame, slot_direction(def, slot));
}

std::vector<CutInterval> block_cuts(const Scheme& s, const BlockInstance& b) {
  std::vector<CutInterval> out;
  const SymbolDef& def = s.symbol_of(b);
  for (const BlockAttachment& at : b.attachments) {
    const Pipe& pipe = s.pipe(at.pipe);
    const double len = pipe.length();
    if (def.attachment.kind == AttachmentKind::kAxial) {
      const double t = project_parameter(pipe.a, pipe.b, b.position);
      const double half = def.attachment.cut_length.value_or(0.0) * b.scale / 2.0 / len;
      out.push_back({at.pipe, b.id, t - half, t + half});
    } else {
      const double r = slot_length(def, at.slot) * b.scale / len;
      if (nearest_end(pipe, b.position) == End::kA) {
        out.push_back({at.pipe, b.id, 0.0, r});
      } else {
        out.push_back({at.pipe, b.id, 1.0 - r, 1.0});
      }
    }
  }
  return out;
}

std::vector<CutInterval> cuts_on_pipe(const Scheme& s, ObjectId pipe) {
  std::vector<CutInterval> out;
  for (const auto& [_, b] : s.blocks) {
    if (!b.attached_to(pipe)) continue;
    for (const CutInterval& c : block_cuts(s, b)) {
      if (c.pipe == pipe) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [](const CutInterval& x, const CutInterval& y) {
    return x.t0 != y.t0 ? x.t0 < y.t0 : x.block < y.block;
  });
  return out;
}

void check_cuts(const Scheme& s, ObjectId pipe) {
  const auto cuts = cuts_on_pipe(s, pipe);
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (cuts[i].t0 < -kCutTolerance || cuts[i].t1 > 1.0 + kCutTolerance) {
      fail(ErrorCode::kCutCollision,
           "block " + std::to_string(cuts[i].block) + " does not fit on pipe " + std::to_string(pipe));
    }
    if (i > 0 && cuts[i].t0 < cuts[i - 1].t1 - kCutTolerance) {
      fail(ErrorCode::kCutCollision, "blocks " + std::to_string(cuts[i - 1].block) + " and " +
                                         std::to_string(cuts[i].block) + " overlap on pipe " +
                                         std::to_string(pipe));
    }
  }
}

std::string_view end_name(End e) { return e == End::kA ? "A" : "B"; }

End parse_end(std::string_view text) {
  if (text == "A" || text == "a") return End::kA;
  if (text == "B" || text == "b") return End::kB;
  fail(ErrorCode::kInvalidArgument, "bad pipe end '" + std::string(text) + "'");
}

}  // namespace axon
