#include "axon/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "axon/core.hpp"
#include "axon/error.hpp"

namespace axon {

namespace {

constexpr double kMaxAttachAngle = kPi / 4.0;
constexpr double kFrameMatch = 1e-9;
constexpr double kInPlane = 1e-6;

void require_valid(const SymbolDef& def) {
  const auto v = validate_symbol(def);
  if (!v.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "symbol '" + def.name + "' is invalid: " + std::string(symbol_violation_name(v.front())));
  }
}

void register_symbol(Scheme& s, const SymbolDef& def) {
  auto it = s.symbols.find(def.name);
  if (it == s.symbols.end()) {
    s.symbols.emplace(def.name, def);
  } else if (!(it->second == def)) {
    bool used = false;
    for (const auto& [_, b] : s.blocks) used = used || b.symbol == def.name;
    if (used) fail(ErrorCode::kInvalidArgument, "symbol '" + def.name + "' is already placed with another definition");
    it->second = def;
  }
}

double frame_distance(const Frame& a, const Frame& b) {
  return norm(a.u - b.u) + norm(a.v - b.v) + norm(a.n - b.n);
}

// Direction from the junction toward the far end of the pipe.
Vec3 outward(const Pipe& p, Point3 junction) {
  const End near = distance(p.a, junction) <= distance(p.b, junction) ? End::kA : End::kB;
  return normalized(p.end_point(opposite(near)) - p.end_point(near));
}

bool has_end_at(const Pipe& p, Point3 at) { return coincident(p.a, at) || coincident(p.b, at); }

// Free slot closest in angle to dir, or -1 when none is within 45 degrees.
int best_slot(const SymbolDef& def, const Frame& f, Vec3 dir, const std::vector<bool>& used) {
  int best = -1;
  double best_angle = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(used.size()); ++k) {
    if (used[k]) continue;
    const double a = angle_between(to_model(f, slot_direction(def, k)), dir);
    if (a <= kMaxAttachAngle + kAttachAngleTolerance && a < best_angle) {
      best = k;
      best_angle = a;
    }
  }
  return best;
}

// Frame in the plane with normal n taking the local ray onto w.
Frame aligned(Vec3 w, Vec3 n, Vec2 ray) {
  const Vec2 r = normalized(ray);
  const Vec3 w_perp = cross(n, w);
  Frame f;
  f.u = r.x * w - r.y * w_perp;
  f.v = r.y * w + r.x * w_perp;
  f.n = n;
  return f;
}

void junction_variants(const SymbolDef& def, const std::vector<Vec3>& dirs, PlacementPlan& plan) {
  const int arity = attachment_arity(def.attachment);
  const auto base = enumerate_orientations(def, dirs);
  for (int k = 0; k < arity; ++k) {
    for (const OrientationVariant& var : base) {
      OrientationVariant cand = var;
      cand.frame = aligned(dirs[0], var.frame.n, slot_direction(def, k));
      std::vector<bool> used(arity, false);
      std::vector<int> slots = {k};
      used[k] = true;
      bool ok = true;
      for (std::size_t i = 1; i < dirs.size() && ok; ++i) {
        const int slot = best_slot(def, cand.frame, dirs[i], used);
        if (slot < 0) {
          ok = false;
        } else {
          used[slot] = true;
          slots.push_back(slot);
        }
      }
      if (!ok) continue;
      bool seen = false;
      for (std::size_t j = 0; j < plan.variants.size(); ++j) {
        seen = seen || (plan.slots[j] == slots && frame_distance(plan.variants[j].frame, cand.frame) < kFrameMatch);
      }
      if (seen) continue;
      plan.variants.push_back(cand);
      plan.slots.push_back(std::move(slots));
    }
  }
}

// Nearest pipe end within radius, ties to the lower pipe id.
std::optional<PipeEndRef> nearest_end(const Scheme& s, Point3 at, double radius) {
  std::optional<PipeEndRef> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, p] : s.pipes) {
    for (End e : {End::kA, End::kB}) {
      const double d = distance(p.end_point(e), at);
      if (d <= radius && d < best_d) {
        best_d = d;
        best = PipeEndRef{id, e};
      }
    }
  }
  return best;
}

void axial_variants(const SymbolDef& def, const Pipe& host, PlacementPlan& plan) {
  const Vec3 axis[] = {host.direction()};
  for (const OrientationVariant& var : enumerate_orientations(def, axis)) {
    plan.variants.push_back(var);
    plan.slots.push_back({0});
  }
}

double half_cut(const SymbolDef& def, double scale) { return def.attachment.cut_length.value_or(0.0) * scale / 2.0; }

void connect_pairwise(Scheme& s, const BlockInstance& b) {
  for (std::size_t i = 0; i < b.attachments.size(); ++i) {
    for (std::size_t j = i + 1; j < b.attachments.size(); ++j) {
      const Pipe& p = s.pipe(b.attachments[i].pipe);
      const Pipe& q = s.pipe(b.attachments[j].pipe);
      const PipeEndRef e1{p.id, coincident(p.a, b.position) ? End::kA : End::kB};
      const PipeEndRef e2{q.id, coincident(q.a, b.position) ? End::kA : End::kB};
      if (!find_connection(s, e1, e2)) connect_ends(s, e1, e2);
    }
  }
}

ObjectId commit(Scheme& scheme, const SymbolDef& def, const PlacementPlan& plan, int orientation, double scale) {
  if (orientation < 0 || orientation >= static_cast<int>(plan.variants.size())) {
    fail(ErrorCode::kInvalidArgument, "orientation " + std::to_string(orientation) + " out of range, " +
                                          std::to_string(plan.variants.size()) + " available");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::kInvalidArgument, "scale must be positive");
  return atomically(scheme, [&](Scheme& s) {
    register_symbol(s, def);
    BlockInstance b;
    b.id = s.allocate_id();
    b.symbol = def.name;
    b.position = plan.position;
    b.frame = plan.variants[orientation].frame;
    b.scale = scale;
    for (std::size_t i = 0; i < plan.pipes.size(); ++i) b.attachments.push_back({plan.pipes[i], plan.slots[orientation][i]});
    s.blocks.emplace(b.id, b);
    if (def.attachment.kind != AttachmentKind::kAxial) connect_pairwise(s, b);
    for (ObjectId p : plan.pipes) check_cuts(s, p);
    return b.id;
  });
}

}  // namespace

PlacementPlan plan_placement(const Scheme& scheme, const SymbolDef& def, Point3 at, double snap_radius,
                             const std::vector<ObjectId>& extra_pipes) {
  require_valid(def);
  if (!(snap_radius >= 0.0)) fail(ErrorCode::kInvalidArgument, "snap radius must be non-negative");
  PlacementPlan plan;
  const auto end = nearest_end(scheme, at, snap_radius);

  if (def.attachment.kind == AttachmentKind::kAxial) {
    if (!extra_pipes.empty()) fail(ErrorCode::kNoFreeSlot, "axial symbols take a single pipe");
    if (end) {
      const Pipe& p = scheme.pipe(end->pipe);
      const Point3 from = p.end_point(end->end);
      plan.position = from + half_cut(def, 1.0) * normalized(p.end_point(opposite(end->end)) - from);
      plan.pipes = {p.id};
      axial_variants(def, p, plan);
      return plan;
    }
    const Pipe* host = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [_, p] : scheme.pipes) {
      const double t = std::clamp(project_parameter(p.a, p.b, at), 0.0, 1.0);
      const double d = distance(p.at(t), at);
      if (d <= snap_radius && d < best) {
        best = d;
        host = &p;
      }
    }
    if (!host) fail(ErrorCode::kNoHostPipe, "no pipe under the point");
    plan.position = host->at(std::clamp(project_parameter(host->a, host->b, at), 0.0, 1.0));
    plan.pipes = {host->id};
    axial_variants(def, *host, plan);
    return plan;
  }

  if (!end) fail(ErrorCode::kNoHostPipe, "no pipe end near the point");
  const int arity = attachment_arity(def.attachment);
  if (static_cast<int>(extra_pipes.size()) + 1 > arity) {
    fail(ErrorCode::kNoFreeSlot, "symbol '" + def.name + "' takes at most " + std::to_string(arity) + " pipes");
  }
  plan.position = end_point(scheme, *end);
  plan.pipes = {end->pipe};
  for (ObjectId id : extra_pipes) {
    const Pipe& p = scheme.pipe(id);
    if (std::find(plan.pipes.begin(), plan.pipes.end(), id) != plan.pipes.end()) {
      fail(ErrorCode::kInvalidArgument, "pipe " + std::to_string(id) + " given twice");
    }
    if (!has_end_at(p, plan.position)) {
      fail(ErrorCode::kNoHostPipe, "pipe " + std::to_string(id) + " does not end at the junction");
    }
    plan.pipes.push_back(id);
  }
  std::vector<Vec3> dirs;
  for (ObjectId id : plan.pipes) dirs.push_back(outward(scheme.pipe(id), plan.position));
  junction_variants(def, dirs, plan);
  if (plan.variants.empty()) fail(ErrorCode::kRaysIncompatible, "pipe directions do not fit the symbol rays");
  return plan;
}

ObjectId place_block(Scheme& scheme, const SymbolDef& def, Point3 at, double snap_radius, int orientation,
                     const std::vector<ObjectId>& extra_pipes, double scale) {
  PlacementPlan plan = plan_placement(scheme, def, at, snap_radius, extra_pipes);
  if (def.attachment.kind == AttachmentKind::kAxial && scale != 1.0) {
    // Flush placement against an end depends on the scaled cut.
    const Pipe& p = scheme.pipe(plan.pipes[0]);
    const auto end = nearest_end(scheme, at, snap_radius);
    if (end) {
      const Point3 from = p.end_point(end->end);
      plan.position = from + half_cut(def, scale) * normalized(p.end_point(opposite(end->end)) - from);
    }
  }
  return commit(scheme, def, plan, orientation, scale);
}

ObjectId place_block_on_pipe(Scheme& scheme, const SymbolDef& def, PipePoint at, int orientation, double scale) {
  require_valid(def);
  if (def.attachment.kind != AttachmentKind::kAxial) {
    fail(ErrorCode::kInvalidArgument, "only axial symbols sit along a pipe");
  }
  if (!(at.t >= 0.0 && at.t <= 1.0)) fail(ErrorCode::kBadParameter, "parameter must lie in [0, 1]");
  const Pipe& host = scheme.pipe(at.pipe);
  PlacementPlan plan;
  plan.position = host.at(at.t);
  plan.pipes = {host.id};
  axial_variants(def, host, plan);
  return commit(scheme, def, plan, orientation, scale);
}

void attach_pipe_to_block(Scheme& scheme, ObjectId block_id, ObjectId pipe_id) {
  const BlockInstance& b = scheme.block(block_id);
  const Pipe& pipe = scheme.pipe(pipe_id);
  const SymbolDef& def = scheme.symbol_of(b);
  const int arity = attachment_arity(def.attachment);
  if (static_cast<int>(b.attachments.size()) >= arity) {
    fail(ErrorCode::kNoFreeSlot, "block " + std::to_string(block_id) + " has no free attachment");
  }
  if (b.attached_to(pipe_id)) fail(ErrorCode::kInvalidArgument, "pipe is already attached to the block");

  if (def.attachment.kind == AttachmentKind::kAxial) {
    const double t = project_parameter(pipe.a, pipe.b, b.position);
    if (t < 0.0 || t > 1.0 || !coincident(pipe.at(t), b.position)) {
      fail(ErrorCode::kNotAtBlock, "pipe does not pass through the block");
    }
    const Vec3 d = pipe.direction();
    const double a = std::min(angle_between(b.frame.u, d), angle_between(-b.frame.u, d));
    if (a > kMaxAttachAngle + kAttachAngleTolerance) fail(ErrorCode::kAngleTooLarge, "pipe is more than 45 degrees off the ray");
    atomically(scheme, [&](Scheme& s) {
      BlockInstance& nb = s.block(block_id);
      const Vec3 u = dot(nb.frame.u, d) >= 0.0 ? d : -d;
      Vec3 n = nb.frame.n - dot(nb.frame.n, u) * u;
      if (norm(n) <= kInPlane) n = cross(u, nb.frame.v);
      n = normalized(n);
      nb.frame = {u, cross(n, u), n};
      nb.attachments.push_back({pipe_id, 0});
      check_cuts(s, pipe_id);
    });
    return;
  }

  if (!has_end_at(pipe, b.position)) fail(ErrorCode::kNotAtBlock, "pipe does not end at the block");
  const Vec3 d = outward(pipe, b.position);
  std::vector<bool> used(arity, false);
  for (const auto& at : b.attachments) used[at.slot] = true;
  const int slot = best_slot(def, b.frame, d, used);
  if (slot < 0) fail(ErrorCode::kAngleTooLarge, "no free ray within 45 degrees of the pipe");

  atomically(scheme, [&](Scheme& s) {
    BlockInstance& nb = s.block(block_id);
    if (std::abs(dot(d, nb.frame.n)) > kInPlane) {
      if (nb.attachments.empty()) {
        Vec3 n = nb.frame.n - dot(nb.frame.n, d) * d;
        if (norm(n) <= kInPlane) n = cross(d, nb.frame.v);
        nb.frame = aligned(d, normalized(n), slot_direction(def, slot));
      } else {
        const BlockAttachment ref = *std::min_element(
            nb.attachments.begin(), nb.attachments.end(),
            [](const BlockAttachment& x, const BlockAttachment& y) { return x.slot < y.slot; });
        const Vec3 w = outward(s.pipe(ref.pipe), nb.position);
        Vec3 n = cross(w, d);
        if (norm(n) <= kInPlane) {
          n = nb.frame.n - dot(nb.frame.n, w) * w;
        }
        n = normalized(n);
        if (dot(n, nb.frame.n) < 0.0) n = -n;
        nb.frame = aligned(w, n, slot_direction(def, ref.slot));
      }
    }
    nb.attachments.push_back({pipe_id, slot});
    connect_pairwise(s, nb);
    for (const auto& at : nb.attachments) check_cuts(s, at.pipe);
  });
}

ObjectId replace_block(Scheme& scheme, ObjectId block_id, const SymbolDef& def) {
  require_valid(def);
  const BlockInstance old = scheme.block(block_id);
  const SymbolDef old_def = scheme.symbol_of(old);
  if (old_def == def) return block_id;

  std::vector<BlockAttachment> kept = old.attachments;
  std::sort(kept.begin(), kept.end(), [](const BlockAttachment& x, const BlockAttachment& y) { return x.slot < y.slot; });
  std::vector<BlockAttachment> dropped;
  const auto arity = static_cast<std::size_t>(attachment_arity(def.attachment));
  while (kept.size() > arity) {
    dropped.push_back(kept.back());
    kept.pop_back();
  }

  const bool axial = def.attachment.kind == AttachmentKind::kAxial;
  const bool was_axial = old_def.attachment.kind == AttachmentKind::kAxial;
  Point3 position = old.position;
  PlacementPlan plan;
  if (kept.empty()) {
    plan.variants.push_back({old.frame, Axis::kX, false, false});
    plan.slots.push_back({});
  } else if (axial) {
    const Pipe& host = scheme.pipe(kept[0].pipe);
    if (!was_axial) {
      // Leaves the junction and sits flush against the pipe end there.
      position = position + half_cut(def, old.scale) * outward(host, old.position);
    }
    plan.pipes = {host.id};
    axial_variants(def, host, plan);
  } else {
    for (const auto& at : kept) {
      if (!has_end_at(scheme.pipe(at.pipe), old.position)) {
        fail(ErrorCode::kNotAtBlock, "pipe " + std::to_string(at.pipe) + " does not end at the block");
      }
    }
    std::vector<Vec3> dirs;
    for (const auto& at : kept) {
      plan.pipes.push_back(at.pipe);
      dirs.push_back(outward(scheme.pipe(at.pipe), old.position));
    }
    junction_variants(def, dirs, plan);
    if (plan.variants.empty()) fail(ErrorCode::kRaysIncompatible, "kept pipes do not fit the new symbol rays");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < plan.variants.size(); ++i) {
    if (frame_distance(plan.variants[i].frame, old.frame) < frame_distance(plan.variants[best].frame, old.frame) - kFrameMatch) {
      best = i;
    }
  }

  atomically(scheme, [&](Scheme& s) {
    register_symbol(s, def);
    BlockInstance& b = s.block(block_id);
    b.symbol = def.name;
    b.position = position;
    b.frame = plan.variants[best].frame;
    b.attachments.clear();
    for (std::size_t i = 0; i < plan.pipes.size(); ++i) b.attachments.push_back({plan.pipes[i], plan.slots[best][i]});
    if (!was_axial) {
      for (const auto& gone : dropped) {
        const Pipe& p = s.pipe(gone.pipe);
        const PipeEndRef e{p.id, coincident(p.a, old.position) ? End::kA : End::kB};
        for (const auto& other : old.attachments) {
          if (other.pipe == gone.pipe) continue;
          const Pipe& q = s.pipe(other.pipe);
          const PipeEndRef f{q.id, coincident(q.a, old.position) ? End::kA : End::kB};
          if (auto c = find_connection(s, e, f)) s.connections.erase(*c);
        }
      }
    }
    for (const auto& at : old.attachments) check_cuts(s, at.pipe);
  });
  return block_id;
}

}  // namespace axon
