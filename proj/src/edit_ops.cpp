#include "axon/edit_ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "axon/core.hpp"
#include "axon/error.hpp"
#include "axon/snap.hpp"

namespace axon {

namespace {

constexpr double kParamTolerance = 1e-9;
constexpr double kParallelTolerance = 1e-9;

using ParamMap = std::function<PipePoint(double)>;
using EndMap = std::function<PipeEndRef(End)>;

bool is_axial(const Scheme& s, const BlockInstance& b) {
  return s.symbol_of(b).attachment.kind == AttachmentKind::kAxial;
}

double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

// Junction block at the end that also holds other pipes, if any.
std::optional<ObjectId> pinning_block(const Scheme& s, PipeEndRef end) {
  const Point3 at = end_point(s, end);
  for (const auto& [id, b] : s.blocks) {
    if (is_axial(s, b) || !coincident(b.position, at)) continue;
    const bool mine = std::any_of(b.attachments.begin(), b.attachments.end(),
                                  [&](const BlockAttachment& a) { return a.pipe == end.pipe; });
    const bool others = std::any_of(b.attachments.begin(), b.attachments.end(),
                                    [&](const BlockAttachment& a) { return a.pipe != end.pipe; });
    if (mine && others) return id;
  }
  return std::nullopt;
}

PipeEndRef ordered_first(PipeEndRef a, PipeEndRef b) { return std::min(a, b); }

// Moves every reference held on old_pipe onto replacement pipes. The
// replacements must already be stored; old_geom is the pipe before the edit.
void rehome(Scheme& s, ObjectId old_pipe, const Pipe& old_geom, const ParamMap& param, const EndMap& ends) {
  for (auto& [_, b] : s.blocks) {
    for (auto& at : b.attachments) {
      if (at.pipe != old_pipe) continue;
      if (is_axial(s, b)) {
        const PipePoint np = param(project_parameter(old_geom.a, old_geom.b, b.position));
        at.pipe = np.pipe;
        b.position = point_at(s, np);
      } else {
        const End e = distance(old_geom.a, b.position) <= distance(old_geom.b, b.position) ? End::kA : End::kB;
        at.pipe = ends(e).pipe;
      }
    }
  }
  for (auto& [_, c] : s.connections) {
    if (c.first.pipe == old_pipe) c.first = ends(c.first.end);
    if (c.second.pipe == old_pipe) c.second = ends(c.second.end);
    const PipeEndRef lo = ordered_first(c.first, c.second);
    c.second = lo == c.first ? c.second : c.first;
    c.first = lo;
  }
  // Rehoming can only produce self or duplicate links in degenerate layouts.
  std::set<std::pair<PipeEndRef, PipeEndRef>> seen;
  for (auto it = s.connections.begin(); it != s.connections.end();) {
    const bool bad = it->second.first.pipe == it->second.second.pipe ||
                     !seen.insert({it->second.first, it->second.second}).second;
    it = bad ? s.connections.erase(it) : std::next(it);
  }
  for (auto& [_, d] : s.dimensions) {
    for (auto& o : d.origins) {
      if (auto* e = std::get_if<PipeEndRef>(&o); e && e->pipe == old_pipe) *e = ends(e->end);
    }
  }
  auto remap_leaders = [&](std::vector<Leader>& leaders) {
    for (auto& l : leaders) {
      if (auto* pp = std::get_if<PipePoint>(&l.target); pp && pp->pipe == old_pipe) *pp = param(pp->t);
    }
  };
  for (auto& [_, t] : s.texts) remap_leaders(t.leaders);
  for (auto& [_, pd] : s.designators) remap_leaders(pd.leaders);
  for (auto& [_, h] : s.height_marks) {
    if (h.at.pipe == old_pipe) h.at = param(h.at.t);
  }
  for (auto& [_, o] : s.offsets) {
    if (o.anchor.pipe == old_pipe) o.anchor = param(o.anchor.t);
    for (auto& bp : o.broken_pipes) {
      if (bp.pipe == old_pipe) bp = param(bp.t);
    }
    if (o.scope_pipe == old_pipe) o.scope_pipe = ends(End::kA).pipe;
  }
  if (old_geom.designator) {
    const ObjectId heir = ends(End::kA).pipe;
    s.pipe(heir).designator = old_geom.designator;
    s.designators.at(*old_geom.designator).target = heir;
  }
}

// Parameters at or below a break go to the lower piece.
ParamMap piecewise(std::vector<ObjectId> pieces, std::vector<double> breaks) {
  return [pieces = std::move(pieces), breaks = std::move(breaks)](double t) {
    std::size_t k = 0;
    while (k < breaks.size() && t > breaks[k] + kParamTolerance) ++k;
    const double lo = k == 0 ? 0.0 : breaks[k - 1];
    const double hi = k == breaks.size() ? 1.0 : breaks[k];
    return PipePoint{pieces[k], clamp01((t - lo) / (hi - lo))};
  };
}

bool inside_cut(const Scheme& s, ObjectId pipe, double t) {
  for (const CutInterval& c : cuts_on_pipe(s, pipe)) {
    if (t >= c.t0 - kParamTolerance && t <= c.t1 + kParamTolerance) return true;
  }
  return false;
}

ObjectId add_piece(Scheme& s, const Pipe& like, Point3 a, Point3 b) {
  const ObjectId id = add_pipe(s, a, b);
  s.pipe(id).visible = like.visible;
  return id;
}

// Moves one end of a pipe and carries what is positioned on it: parameters
// keep their distance from the fixed end, axial blocks are repacked so they fit,
// and non-axial blocks sitting on the moving end travel with it.
void relocate_end(Scheme& s, PipeEndRef end, Point3 target) {
  const Pipe old = s.pipe(end.pipe);
  const Point3 fixed = old.end_point(opposite(end.end));
  const Point3 moving = old.end_point(end.end);
  const double old_len = old.length();
  const double new_len = distance(fixed, target);
  if (new_len <= kEpsilon) fail(ErrorCode::kZeroLengthPipe, "pipe " + std::to_string(end.pipe) + " collapses");
  const Vec3 old_dir = normalized(moving - fixed);
  const Vec3 new_dir = normalized(target - fixed);
  const bool moves_b = end.end == End::kB;

  auto remap = [&](double t) {
    const double d = (moves_b ? t : 1.0 - t) * old_len;
    const double u = clamp01(d / new_len);
    return moves_b ? u : 1.0 - u;
  };
  auto remap_leaders = [&](std::vector<Leader>& leaders) {
    for (auto& l : leaders) {
      if (auto* pp = std::get_if<PipePoint>(&l.target); pp && pp->pipe == end.pipe) pp->t = remap(pp->t);
    }
  };
  for (auto& [_, t] : s.texts) remap_leaders(t.leaders);
  for (auto& [_, pd] : s.designators) remap_leaders(pd.leaders);
  for (auto& [_, h] : s.height_marks) {
    if (h.at.pipe == end.pipe) h.at.t = remap(h.at.t);
  }
  for (auto& [_, o] : s.offsets) {
    if (o.anchor.pipe == end.pipe) o.anchor.t = remap(o.anchor.t);
    for (auto& bp : o.broken_pipes) {
      if (bp.pipe == end.pipe) bp.t = remap(bp.t);
    }
  }

  struct Item {
    ObjectId block;
    double center;
    double half;
  };
  std::vector<Item> items;
  double lo = 0.0;
  double hi = new_len;
  for (auto& [id, b] : s.blocks) {
    if (!b.attached_to(end.pipe)) continue;
    const SymbolDef& def = s.symbol_of(b);
    if (def.attachment.kind == AttachmentKind::kAxial) {
      items.push_back({id, dot(b.position - fixed, old_dir), def.attachment.cut_length.value_or(0.0) * b.scale / 2});
      continue;
    }
    double reach = 0.0;
    for (const auto& at : b.attachments) {
      if (at.pipe == end.pipe) reach = slot_length(def, at.slot) * b.scale;
    }
    if (coincident(b.position, moving)) {
      b.position = target;
      hi = std::min(hi, new_len - reach);
    } else {
      lo = std::max(lo, reach);
    }
  }
  std::sort(items.begin(), items.end(),
            [](const Item& x, const Item& y) { return x.center != y.center ? x.center < y.center : x.block < y.block; });
  for (Item& it : items) {
    if (lo + it.half > hi - it.half + kEpsilon) {
      fail(ErrorCode::kCutCollision, "block " + std::to_string(it.block) + " no longer fits on pipe " +
                                         std::to_string(end.pipe));
    }
    it.center = std::clamp(it.center, lo + it.half, std::max(lo + it.half, hi - it.half));
  }
  for (std::size_t i = 1; i < items.size(); ++i) {
    items[i].center = std::max(items[i].center, items[i - 1].center + items[i - 1].half + items[i].half);
  }
  for (std::size_t i = items.size(); i-- > 0;) {
    const double limit = i + 1 < items.size() ? items[i + 1].center - items[i + 1].half - items[i].half
                                              : hi - items[i].half;
    items[i].center = std::min(items[i].center, limit);
  }
  if (!items.empty() && items.front().center - items.front().half < lo - kEpsilon) {
    fail(ErrorCode::kCutCollision, "blocks no longer fit on pipe " + std::to_string(end.pipe));
  }
  for (const Item& it : items) s.block(it.block).position = fixed + it.center * new_dir;

  Pipe& p = s.pipe(end.pipe);
  (moves_b ? p.b : p.a) = target;
}

}  // namespace

std::vector<ObjectId> sketch_line(Scheme& scheme, const std::vector<Point3>& vertices, double snap_radius) {
  if (vertices.size() < 2) fail(ErrorCode::kDegenerateLine, "a line needs at least two vertices");
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    Point3 p = snap_radius > 0.0 ? snap(scheme, vertices[i], snap_radius) : vertices[i];
    if (i > 0) p = orthogonalize(pts.back(), p);
    if (pts.empty() || !coincident(pts.back(), p)) pts.push_back(p);
  }
  if (pts.size() < 2) fail(ErrorCode::kDegenerateLine, "no segment survives");
  return atomically(scheme, [&](Scheme& s) {
    std::vector<ObjectId> ids;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      ids.push_back(add_pipe(s, pts[i - 1], pts[i]));
      if (i > 1) connect_ends(s, {ids[i - 2], End::kB}, {ids[i - 1], End::kA});
    }
    return ids;
  });
}

std::vector<ObjectId> insert_elbow(Scheme& scheme, ObjectId pipe, double t_start, double t_end, AxisDir dir,
                                   double shift) {
  const Pipe old = scheme.pipe(pipe);
  if (!(t_start > 0.0 && t_start < t_end && t_end < 1.0)) {
    fail(ErrorCode::kBadInterval, "elbow needs 0 < start < end < 1");
  }
  const double len = old.length();
  if (t_start * len <= kEpsilon || (t_end - t_start) * len <= kEpsilon || (1.0 - t_end) * len <= kEpsilon) {
    fail(ErrorCode::kBadInterval, "elbow leaves a zero-length piece");
  }
  if (!(shift > kEpsilon)) fail(ErrorCode::kInvalidArgument, "elbow shift must be positive");
  const Vec3 d = axis_vector(dir);
  if (std::abs(dot(d, old.direction())) >= 1.0 - kParallelTolerance) {
    fail(ErrorCode::kDirParallelToPipe, "elbow direction is parallel to the pipe");
  }
  if (inside_cut(scheme, pipe, t_start) || inside_cut(scheme, pipe, t_end)) {
    fail(ErrorCode::kPointOccupied, "elbow point lies under a block");
  }

  return atomically(scheme, [&](Scheme& s) {
    const Point3 a = old.at(t_start);
    const Point3 b = old.at(t_end);
    const Point3 a2 = a + shift * d;
    const Point3 b2 = b + shift * d;
    const std::vector<ObjectId> ids = {add_piece(s, old, old.a, a), add_piece(s, old, a, a2),
                                       add_piece(s, old, a2, b2), add_piece(s, old, b2, b),
                                       add_piece(s, old, b, old.b)};
    const ParamMap base = piecewise({ids[0], ids[2], ids[4]}, {t_start, t_end});
    rehome(s, pipe, old, base, [&](End e) { return PipeEndRef{e == End::kA ? ids[0] : ids[4], e}; });
    s.pipes.erase(pipe);
    for (std::size_t i = 1; i < ids.size(); ++i) connect_ends(s, {ids[i - 1], End::kB}, {ids[i], End::kA});
    for (ObjectId id : ids) check_cuts(s, id);
    return ids;
  });
}

void extend_pipe(Scheme& scheme, PipeEndRef end, Point3 new_point) {
  const Pipe& p = scheme.pipe(end.pipe);
  if (!connections_at(scheme, end).empty()) fail(ErrorCode::kEndConnected, "end is connected to other pipes");
  // A junction block holding other pipes pins the end even without a connection.
  if (const auto b = pinning_block(scheme, end)) fail(ErrorCode::kEndConnected, "end is held by block " + std::to_string(*b));
  const Point3 fixed = p.end_point(opposite(end.end));
  if (norm(cross(new_point - fixed, p.direction())) > kEpsilon) {
    fail(ErrorCode::kOffAxis, "new point is off the pipe axis");
  }
  atomically(scheme, [&](Scheme& s) {
    relocate_end(s, end, new_point);
    check_cuts(s, end.pipe);
  });
}

std::vector<ObjectId> move_point(Scheme& scheme, PipeEndRef end, Point3 new_point, MoveScope scope) {
  const Point3 old_point = end_point(scheme, end);
  if (scope == MoveScope::kOnlyThis && !connections_at(scheme, end).empty()) {
    fail(ErrorCode::kScopeForbidden, "a connected end always moves with every pipe at the point");
  }
  const std::vector<PipeEndRef> moving =
      scope == MoveScope::kAllAtPoint ? ends_at(scheme, old_point) : std::vector<PipeEndRef>{end};
  IdSet moving_pipes;
  for (const auto& e : moving) moving_pipes.insert(e.pipe);
  for (const auto& [id, b] : scheme.blocks) {
    if (is_axial(scheme, b) || !coincident(b.position, old_point)) continue;
    const bool touches = std::any_of(b.attachments.begin(), b.attachments.end(),
                                     [&](const BlockAttachment& a) { return moving_pipes.count(a.pipe) > 0; });
    const bool all = std::all_of(b.attachments.begin(), b.attachments.end(),
                                 [&](const BlockAttachment& a) { return moving_pipes.count(a.pipe) > 0; });
    if (touches && !all) {
      fail(ErrorCode::kScopeForbidden, "block " + std::to_string(id) + " joins pipes that would stay behind");
    }
  }
  std::vector<ObjectId> out(moving_pipes.begin(), moving_pipes.end());
  if (coincident(old_point, new_point, 0.0)) return out;
  atomically(scheme, [&](Scheme& s) {
    for (const auto& e : moving) relocate_end(s, e, new_point);
    for (ObjectId id : moving_pipes) check_cuts(s, id);
  });
  return out;
}

std::vector<ObjectId> cut_pipe(Scheme& scheme, ObjectId pipe, double t) {
  const Pipe old = scheme.pipe(pipe);
  if (!(t > 0.0 && t < 1.0) || t * old.length() <= kEpsilon || (1.0 - t) * old.length() <= kEpsilon) {
    fail(ErrorCode::kBadParameter, "cut parameter must leave two nonzero pieces");
  }
  if (inside_cut(scheme, pipe, t)) fail(ErrorCode::kPointOccupied, "cut point lies under a block");

  return atomically(scheme, [&](Scheme& s) {
    const Point3 c = old.at(t);
    const ObjectId h1 = add_piece(s, old, old.a, c);
    const ObjectId h2 = add_piece(s, old, c, old.b);
    rehome(s, pipe, old, piecewise({h1, h2}, {t}),
           [&](End e) { return PipeEndRef{e == End::kA ? h1 : h2, e}; });
    s.pipes.erase(pipe);
    connect_ends(s, {h1, End::kB}, {h2, End::kA});
    for (const PipeEndRef& e : ends_at(s, c)) {
      if (e.pipe == h1 || e.pipe == h2) continue;
      for (PipeEndRef half : {PipeEndRef{h1, End::kB}, PipeEndRef{h2, End::kA}}) {
        if (!find_connection(s, e, half)) connect_ends(s, e, half);
      }
    }
    return std::vector<ObjectId>{h1, h2};
  });
}

namespace {

struct Continuation {
  End side;
  ObjectId other;
  End other_end;
};

std::vector<Continuation> continuations(const Scheme& s, ObjectId pipe, End side) {
  const Pipe& p = s.pipe(pipe);
  const Point3 j = p.end_point(side);
  const Vec3 dir = normalized(j - p.end_point(opposite(side)));
  std::vector<Continuation> out;
  for (const PipeEndRef& e : ends_at(s, j)) {
    if (e.pipe == pipe || !find_connection(s, {pipe, side}, e)) continue;
    const Pipe& q = s.pipe(e.pipe);
    const Vec3 qdir = normalized(q.end_point(opposite(e.end)) - j);
    if (dot(dir, qdir) >= 1.0 - kParallelTolerance) out.push_back({side, e.pipe, e.end});
  }
  return out;
}

}  // namespace

ObjectId merge_pipes(Scheme& scheme, ObjectId pipe, std::optional<End> side) {
  scheme.pipe(pipe);
  std::vector<Continuation> found;
  if (side) {
    found = continuations(scheme, pipe, *side);
  } else {
    const auto on_a = continuations(scheme, pipe, End::kA);
    const auto on_b = continuations(scheme, pipe, End::kB);
    if (!on_a.empty() && !on_b.empty()) {
      fail(ErrorCode::kAmbiguousSide, "continuations on both sides; pick the junction side");
    }
    found = on_a.empty() ? on_b : on_a;
  }
  if (found.empty()) fail(ErrorCode::kNoContinuation, "no connected collinear continuation");
  const Continuation cont = found.front();

  const Pipe p_old = scheme.pipe(pipe);
  const Pipe q_old = scheme.pipe(cont.other);
  const Point3 junction = p_old.end_point(cont.side);
  for (const auto& [id, d] : scheme.dimensions) {
    for (const auto& o : d.origins) {
      if (coincident(origin_point(scheme, o), junction)) {
        fail(ErrorCode::kJunctionLocked, "junction is an extension-line origin of dimension " + std::to_string(id));
      }
    }
  }
  for (const auto& [id, b] : scheme.blocks) {
    if (is_axial(scheme, b) || !coincident(b.position, junction)) continue;
    if (b.attached_to(pipe) || b.attached_to(cont.other)) {
      fail(ErrorCode::kJunctionLocked, "junction is an attachment point of block " + std::to_string(id));
    }
  }
  if (p_old.designator && q_old.designator) {
    fail(ErrorCode::kDesignatorConflict, "both pipes carry position designators");
  }

  atomically(scheme, [&](Scheme& s) {
    const PipeEndRef pj{pipe, cont.side};
    const PipeEndRef qj{cont.other, cont.other_end};
    std::erase_if(s.connections, [&](const auto& kv) { return kv.second.involves(pj) || kv.second.involves(qj); });

    Pipe& p = s.pipe(pipe);
    (cont.side == End::kA ? p.a : p.b) = q_old.end_point(opposite(cont.other_end));
    const Pipe merged = p;
    auto by_point = [&](const Pipe& from) {
      return [&merged, from, pipe](double t) {
        return PipePoint{pipe, clamp01(project_parameter(merged.a, merged.b, from.at(t)))};
      };
    };
    rehome(s, pipe, p_old, by_point(p_old), [&](End e) { return PipeEndRef{pipe, e}; });
    s.pipe(pipe).designator = p_old.designator;
    Pipe q_detached = q_old;
    if (q_old.designator && !p_old.designator) {
      s.pipe(pipe).designator = q_old.designator;
      s.designators.at(*q_old.designator).target = pipe;
      q_detached.designator.reset();
    }
    rehome(s, cont.other, q_detached, by_point(q_old), [&](End) { return PipeEndRef{pipe, cont.side}; });
    s.pipes.erase(cont.other);
    check_cuts(s, pipe);
  });
  return pipe;
}

DeleteResult delete_pipe(Scheme& scheme, ObjectId pipe) {
  scheme.pipe(pipe);
  const IdSet closed = reference_closure(scheme, {pipe}, BlockSurvival::kDeleteAttached);
  return atomically(scheme, [&](Scheme& s) {
    auto report = delete_closed_set(s, closed);
    return DeleteResult{std::move(report.deleted), std::move(report.warnings)};
  });
}

IdSet preview_delete_part(const Scheme& scheme, const IdSet& seed) {
  return reference_closure(scheme, seed, BlockSurvival::kPrune);
}

DeleteResult delete_part(Scheme& scheme, const IdSet& seed) {
  const IdSet closed = preview_delete_part(scheme, seed);
  return atomically(scheme, [&](Scheme& s) {
    auto report = delete_closed_set(s, closed);
    return DeleteResult{std::move(report.deleted), std::move(report.warnings)};
  });
}

MoveResult move_part(Scheme& scheme, const IdSet& pipes, Vec3 shift) {
  for (ObjectId id : pipes) scheme.pipe(id);
  MoveResult result;
  if (norm(shift) == 0.0) return result;
  if (!is_finite(shift)) fail(ErrorCode::kInvalidArgument, "shift must be finite");

  return atomically(scheme, [&](Scheme& s) {
    for (ObjectId id : pipes) {
      Pipe& p = s.pipe(id);
      p.a = p.a + shift;
      p.b = p.b + shift;
      result.moved.insert(id);
    }
    IdSet moved_blocks;
    for (auto& [id, b] : s.blocks) {
      const auto in = std::count_if(b.attachments.begin(), b.attachments.end(),
                                    [&](const BlockAttachment& a) { return pipes.count(a.pipe) > 0; });
      if (in == 0) continue;
      if (in == static_cast<long>(b.attachments.size())) {
        b.position = b.position + shift;
        moved_blocks.insert(id);
        result.moved.insert(id);
      } else {
        std::erase_if(b.attachments, [&](const BlockAttachment& a) { return pipes.count(a.pipe) > 0; });
        result.warnings.push_back("block " + std::to_string(id) + " detached from moved pipes");
      }
    }
    for (auto it = s.connections.begin(); it != s.connections.end();) {
      const bool a = pipes.count(it->second.first.pipe) > 0;
      const bool b = pipes.count(it->second.second.pipe) > 0;
      if (a != b) {
        result.warnings.push_back("connection " + std::to_string(it->first) + " broken by the move");
        it = s.connections.erase(it);
      } else {
        if (a) result.moved.insert(it->first);
        ++it;
      }
    }
    const Vec2 paper = project(shift, s.settings.projection);
    auto follows = [&](const std::vector<Leader>& leaders) {
      return std::all_of(leaders.begin(), leaders.end(), [&](const Leader& l) {
        if (const auto* pp = std::get_if<PipePoint>(&l.target)) return pipes.count(pp->pipe) > 0;
        return moved_blocks.count(std::get<BlockRef>(l.target).block) > 0;
      });
    };
    auto carry = [&](auto& map) {
      for (auto& [id, obj] : map) {
        if (obj.leaders.empty() || !follows(obj.leaders)) continue;
        for (auto& l : obj.leaders) l.anchor = l.anchor + paper;
        result.moved.insert(id);
      }
    };
    carry(s.texts);
    carry(s.designators);
    for (auto& [id, h] : s.height_marks) {
      if (!pipes.count(h.at.pipe)) continue;
      h.level += shift.z / 1000.0;
      result.moved.insert(id);
    }
    for (const auto& [id, d] : s.dimensions) {
      const bool all = std::all_of(d.origins.begin(), d.origins.end(), [&](const DimOrigin& o) {
        if (const auto* e = std::get_if<PipeEndRef>(&o)) return pipes.count(e->pipe) > 0;
        return moved_blocks.count(std::get<BlockPointRef>(o).block) > 0;
      });
      if (all) result.moved.insert(id);
    }
    return result;
  });
}

IdSet preview_move_branch(const Scheme& scheme, ObjectId seed) {
  scheme.pipe(seed);
  if (connections_of(scheme, seed).empty()) fail(ErrorCode::kNoConnections, "pipe has no connections");
  return branch_of(scheme, seed);
}

MoveResult move_branch(Scheme& scheme, ObjectId seed, Vec3 shift) {
  return move_part(scheme, preview_move_branch(scheme, seed), shift);
}

namespace {

std::vector<ObjectId> references_of(const Scheme& s, ObjectId id) {
  std::vector<ObjectId> out;
  auto leaders = [&out](const std::vector<Leader>& ls) {
    for (const auto& l : ls) {
      if (const auto* pp = std::get_if<PipePoint>(&l.target)) {
        out.push_back(pp->pipe);
      } else {
        out.push_back(std::get<BlockRef>(l.target).block);
      }
    }
  };
  if (auto it = s.connections.find(id); it != s.connections.end()) {
    out = {it->second.first.pipe, it->second.second.pipe};
  } else if (auto it = s.blocks.find(id); it != s.blocks.end()) {
    for (const auto& a : it->second.attachments) out.push_back(a.pipe);
  } else if (auto it = s.dimensions.find(id); it != s.dimensions.end()) {
    for (const auto& o : it->second.origins) {
      if (const auto* e = std::get_if<PipeEndRef>(&o)) {
        out.push_back(e->pipe);
      } else {
        out.push_back(std::get<BlockPointRef>(o).block);
      }
    }
  } else if (auto it = s.texts.find(id); it != s.texts.end()) {
    leaders(it->second.leaders);
  } else if (auto it = s.designators.find(id); it != s.designators.end()) {
    out.push_back(it->second.target);
    leaders(it->second.leaders);
  } else if (auto it = s.height_marks.find(id); it != s.height_marks.end()) {
    out.push_back(it->second.at.pipe);
  } else if (auto it = s.offsets.find(id); it != s.offsets.end()) {
    out.push_back(it->second.anchor.pipe);
    for (const auto& bp : it->second.broken_pipes) out.push_back(bp.pipe);
    if (it->second.scope_pipe) out.push_back(*it->second.scope_pipe);
  }
  return out;
}

std::vector<IdSet> replicate_block(Scheme& scheme, ObjectId block_id, Vec3 shift, int count) {
  const BlockInstance src = scheme.block(block_id);
  if (!is_axial(scheme, src)) fail(ErrorCode::kOffPipe, "only axial blocks are copied along their pipe");
  const Pipe& host = scheme.pipe(src.attachments.front().pipe);
  if (norm(cross(shift, host.direction())) > kEpsilon || norm(shift) <= kEpsilon) {
    fail(ErrorCode::kOffPipe, "a single block is copied only along its pipe");
  }
  const double half = scheme.symbol_of(src).attachment.cut_length.value_or(0.0) * src.scale / 2.0;
  for (int k = 1; k <= count; ++k) {
    const Point3 p = src.position + static_cast<double>(k) * shift;
    const double along = dot(p - host.a, host.direction());
    if (along - half < -kEpsilon || along + half > host.length() + kEpsilon) {
      fail(ErrorCode::kDoesNotFit, "copy " + std::to_string(k) + " does not fit on pipe " +
                                       std::to_string(host.id));
    }
  }
  return atomically(scheme, [&](Scheme& s) {
    std::vector<IdSet> out;
    for (int k = 1; k <= count; ++k) {
      BlockInstance copy = src;
      copy.id = s.allocate_id();
      copy.position = src.position + static_cast<double>(k) * shift;
      copy.designator.reset();
      s.blocks.emplace(copy.id, copy);
      out.push_back({copy.id});
    }
    check_cuts(s, host.id);
    return out;
  });
}

}  // namespace

std::vector<IdSet> replicate(Scheme& scheme, const IdSet& selection, Vec3 shift, int count) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "count must be at least 1");
  if (!is_finite(shift)) fail(ErrorCode::kInvalidArgument, "shift must be finite");
  for (ObjectId id : selection) {
    if (!scheme.contains(id)) fail(ErrorCode::kUnknownId, "no object with id " + std::to_string(id));
  }
  if (selection.size() == 1 && scheme.blocks.count(*selection.begin())) {
    return replicate_block(scheme, *selection.begin(), shift, count);
  }
  if (reference_closure(scheme, selection) != selection) {
    fail(ErrorCode::kNotClosed, "selection is referenced by objects outside it");
  }
  for (ObjectId id : selection) {
    for (ObjectId ref : references_of(scheme, id)) {
      if (!selection.count(ref)) {
        fail(ErrorCode::kNotClosed, "object " + std::to_string(id) + " refers outside the selection");
      }
    }
  }

  return atomically(scheme, [&](Scheme& s) {
    std::vector<IdSet> out;
    for (int k = 1; k <= count; ++k) {
      const Vec3 d = static_cast<double>(k) * shift;
      const Vec2 paper = project(d, s.settings.projection);
      std::map<ObjectId, ObjectId> remap;
      for (ObjectId id : selection) remap[id] = s.allocate_id();
      auto re = [&remap](ObjectId id) { return remap.at(id); };
      auto re_leaders = [&](std::vector<Leader>& ls) {
        for (auto& l : ls) {
          if (auto* pp = std::get_if<PipePoint>(&l.target)) {
            pp->pipe = re(pp->pipe);
          } else {
            auto& br = std::get<BlockRef>(l.target);
            br.block = re(br.block);
          }
          l.anchor = l.anchor + paper;
        }
      };
      auto weak = [&remap](std::optional<ObjectId>& ref) {
        if (!ref) return;
        auto it = remap.find(*ref);
        ref = it == remap.end() ? std::nullopt : std::optional<ObjectId>(it->second);
      };
      for (ObjectId id : selection) {
        const ObjectId nid = remap[id];
        if (auto it = s.pipes.find(id); it != s.pipes.end()) {
          Pipe p = it->second;
          p.id = nid;
          p.a = p.a + d;
          p.b = p.b + d;
          weak(p.designator);
          s.pipes.emplace(nid, p);
        } else if (auto it = s.connections.find(id); it != s.connections.end()) {
          Connection c = it->second;
          c.id = nid;
          c.first.pipe = re(c.first.pipe);
          c.second.pipe = re(c.second.pipe);
          if (c.second < c.first) std::swap(c.first, c.second);
          s.connections.emplace(nid, c);
        } else if (auto it = s.blocks.find(id); it != s.blocks.end()) {
          BlockInstance b = it->second;
          b.id = nid;
          b.position = b.position + d;
          for (auto& a : b.attachments) a.pipe = re(a.pipe);
          weak(b.designator);
          s.blocks.emplace(nid, b);
        } else if (auto it = s.dimensions.find(id); it != s.dimensions.end()) {
          ChainDimension dim = it->second;
          dim.id = nid;
          for (auto& o : dim.origins) {
            if (auto* e = std::get_if<PipeEndRef>(&o)) {
              e->pipe = re(e->pipe);
            } else {
              auto& br = std::get<BlockPointRef>(o);
              br.block = re(br.block);
            }
          }
          s.dimensions.emplace(nid, dim);
        } else if (auto it = s.texts.find(id); it != s.texts.end()) {
          TextAnnotation t = it->second;
          t.id = nid;
          re_leaders(t.leaders);
          s.texts.emplace(nid, t);
        } else if (auto it = s.designators.find(id); it != s.designators.end()) {
          PositionDesignator pd = it->second;
          pd.id = nid;
          pd.target = re(pd.target);
          re_leaders(pd.leaders);
          s.designators.emplace(nid, pd);
        } else if (auto it = s.height_marks.find(id); it != s.height_marks.end()) {
          HeightMark h = it->second;
          h.id = nid;
          h.at.pipe = re(h.at.pipe);
          h.level += d.z / 1000.0;
          s.height_marks.emplace(nid, h);
        } else if (auto it = s.offsets.find(id); it != s.offsets.end()) {
          OffsetSpec o = it->second;
          o.id = nid;
          o.anchor.pipe = re(o.anchor.pipe);
          for (auto& bp : o.broken_pipes) bp.pipe = re(bp.pipe);
          if (o.scope_pipe) o.scope_pipe = re(*o.scope_pipe);
          s.offsets.emplace(nid, o);
        } else if (auto it = s.grids.find(id); it != s.grids.end()) {
          ConstructionGrid g = it->second;
          g.id = nid;
          for (auto& axis : g.axes) axis.offset += axis.family == GridFamily::kLetters ? d.y : d.x;
          s.grids.emplace(nid, g);
        }
      }
      // Designators copied without their target lose the back link.
      for (auto& [_, pd] : s.designators) {
        if (auto p = s.pipes.find(pd.target); p != s.pipes.end() && !p->second.designator) {
          p->second.designator = pd.id;
        } else if (auto b = s.blocks.find(pd.target); b != s.blocks.end() && !b->second.designator) {
          b->second.designator = pd.id;
        }
      }
      IdSet ids;
      for (const auto& [_, nid] : remap) ids.insert(nid);
      out.push_back(std::move(ids));
    }
    return out;
  });
}

ObjectId set_offset(Scheme& scheme, OffsetSpec spec) {
  const Pipe& anchor = scheme.pipe(spec.anchor.pipe);
  if (!(spec.anchor.t >= 0.0 && spec.anchor.t <= 1.0)) fail(ErrorCode::kBadParameter, "anchor parameter");
  if (spec.half_space_sign != 1 && spec.half_space_sign != -1) {
    fail(ErrorCode::kInvalidArgument, "half-space sign must be +1 or -1");
  }
  if (!is_finite(spec.paper_shift) || norm(spec.paper_shift) == 0.0) {
    fail(ErrorCode::kInvalidArgument, "offset shift must be nonzero");
  }
  if (spec.kind == OffsetKind::kGlobal) {
    if (!spec.broken_pipes.empty() || spec.scope_pipe) {
      fail(ErrorCode::kInvalidArgument, "global offsets take no broken pipes or scope");
    }
  } else {
    if (!spec.scope_pipe) spec.scope_pipe = spec.anchor.pipe;
    scheme.pipe(*spec.scope_pipe);
    const Point3 origin = anchor.at(spec.anchor.t);
    const Vec3 normal = anchor.direction();
    for (const PipePoint& bp : spec.broken_pipes) {
      const Pipe& p = scheme.pipe(bp.pipe);
      const double da = dot(p.a - origin, normal);
      const double db = dot(p.b - origin, normal);
      if (!(bp.t > 0.0 && bp.t < 1.0) || !((da < -kEpsilon && db > kEpsilon) || (da > kEpsilon && db < -kEpsilon))) {
        fail(ErrorCode::kNotCrossing, "pipe " + std::to_string(bp.pipe) + " does not cross the offset plane");
      }
    }
  }
  spec.id = scheme.allocate_id();
  scheme.offsets.emplace(spec.id, spec);
  return spec.id;
}

void set_level(Scheme& scheme, ObjectId mark, double new_level) {
  auto it = scheme.height_marks.find(mark);
  if (it == scheme.height_marks.end()) fail(ErrorCode::kUnknownId, "no height mark with id " + std::to_string(mark));
  if (!std::isfinite(new_level)) fail(ErrorCode::kInvalidArgument, "level must be finite");
  const double delta = new_level - it->second.level;
  if (delta == 0.0) return;
  const double dz = delta * 1000.0;
  for (auto& [_, p] : scheme.pipes) {
    p.a.z += dz;
    p.b.z += dz;
  }
  for (auto& [_, b] : scheme.blocks) b.position.z += dz;
  for (auto& [_, h] : scheme.height_marks) h.level += delta;
}

void move_scheme(Scheme& scheme, Vec2 paper_shift) {
  if (!is_finite(paper_shift)) fail(ErrorCode::kInvalidArgument, "shift must be finite");
  scheme.settings.placement_origin = scheme.settings.placement_origin + paper_shift;
}

void set_visibility(Scheme& scheme, ObjectClass cls, bool visible) { scheme.settings.visibility[cls] = visible; }

void set_projection(Scheme& scheme, const Projection& proj) {
  validate_projection(proj);
  scheme.settings.projection = proj;
}

namespace {

template <class Op>
bool succeeds(const Scheme& scheme, Op&& op) {
  Scheme work = scheme;
  try {
    op(work);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<OpAvailability> applicable_ops(const Scheme& s, const PickTarget& target) {
  std::vector<OpAvailability> ops;
  auto add = [&ops](const char* verb, bool enabled) { ops.push_back({verb, enabled}); };
  switch (target.kind) {
    case PickKind::kPipe: {
      const Pipe& p = s.pipe(target.id);
      add("cut_pipe", true);
      add("insert_elbow", true);
      add("merge_pipes", !continuations(s, p.id, End::kA).empty() || !continuations(s, p.id, End::kB).empty());
      add("move_branch", !connections_of(s, p.id).empty());
      add("set_offset", true);
      add("place_designator", !p.designator);
      add("spec_rows", p.designator.has_value());
      add("delete_pipe", true);
      break;
    }
    case PickKind::kPipeEnd: {
      const PipeEndRef e{target.id, target.end};
      const Point3 at = end_point(s, e);
      const bool connected = !connections_at(s, e).empty();
      bool can_connect = false;
      for (const PipeEndRef& other : ends_at(s, at)) {
        if (other.pipe != e.pipe && !find_connection(s, e, other)) can_connect = true;
      }
      add("extend_pipe", !connected && !pinning_block(s, e));
      add("move_point", true);
      add("connect_ends", can_connect);
      add("disconnect_ends", connected);
      add("merge_pipes", succeeds(s, [&](Scheme& w) { merge_pipes(w, e.pipe, e.end); }));
      break;
    }
    case PickKind::kBlock: {
      const BlockInstance& b = s.block(target.id);
      const SymbolDef& def = s.symbol_of(b);
      add("attach_pipe", static_cast<int>(b.attachments.size()) < attachment_arity(def.attachment));
      add("replace_block", true);
      add("replicate", def.attachment.kind == AttachmentKind::kAxial);
      add("place_designator", !b.designator);
      add("spec_rows", b.designator.has_value());
      add("delete_part", true);
      break;
    }
    case PickKind::kText: {
      const TextAnnotation& t = s.texts.at(target.id);
      add("change_leader_target", true);
      add("change_main_leader", t.leaders.size() > 1);
      add("delete_part", true);
      break;
    }
    case PickKind::kDesignator: {
      const PositionDesignator& pd = s.designators.at(target.id);
      add("change_leader_target", true);
      add("change_main_leader", pd.leaders.size() > 1);
      add("flange_kit", pd.positions.size() == 4 || pd.positions.size() == 5);
      add("delete_part", true);
      break;
    }
    case PickKind::kHeightMark:
      add("set_level", true);
      add("delete_part", true);
      break;
    case PickKind::kDimension:
      add("delete_part", true);
      break;
  }
  return ops;
}

}  // namespace axon
