#include "axon/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "axon/error.hpp"

namespace axon {

ObjectId add_pipe(Scheme& scheme, Point3 a, Point3 b) {
  if (!is_finite(a) || !is_finite(b)) fail(ErrorCode::kInvalidArgument, "pipe coordinates must be finite");
  if (coincident(a, b)) fail(ErrorCode::kZeroLengthPipe, "pipe ends coincide");
  const ObjectId id = scheme.allocate_id();
  scheme.pipes.emplace(id, Pipe{id, a, b, true, std::nullopt});
  return id;
}

ObjectId connect_ends(Scheme& scheme, PipeEndRef e1, PipeEndRef e2) {
  const Point3 p1 = end_point(scheme, e1);
  const Point3 p2 = end_point(scheme, e2);
  if (e1.pipe == e2.pipe) fail(ErrorCode::kSamePipe, "cannot connect a pipe to itself");
  if (!coincident(p1, p2)) fail(ErrorCode::kNotCoincident, "pipe ends are not in one point");
  if (find_connection(scheme, e1, e2)) fail(ErrorCode::kAlreadyConnected, "ends are already connected");
  if (e2 < e1) std::swap(e1, e2);
  const ObjectId id = scheme.allocate_id();
  scheme.connections.emplace(id, Connection{id, e1, e2});
  return id;
}

void disconnect_ends(Scheme& scheme, ObjectId connection) {
  if (scheme.connections.erase(connection) == 0) {
    fail(ErrorCode::kUnknownId, "no connection with id " + std::to_string(connection));
  }
}

namespace {

struct Group {
  std::vector<ObjectId> members;
  int min_alive = 1;
};

// Survival rule of one object: it joins the deleted set when a strong target
// is deleted or when a group drops below its minimum of live members.
struct Rule {
  std::vector<ObjectId> strong;
  std::vector<Group> groups;
};

ObjectId leader_ref(const Leader& l) {
  if (const auto* pp = std::get_if<PipePoint>(&l.target)) return pp->pipe;
  return std::get<BlockRef>(l.target).block;
}

ObjectId origin_ref(const DimOrigin& o) {
  if (const auto* e = std::get_if<PipeEndRef>(&o)) return e->pipe;
  return std::get<BlockPointRef>(o).block;
}

std::map<ObjectId, Rule> build_rules(const Scheme& s, BlockSurvival blocks) {
  std::map<ObjectId, Rule> rules;
  for (const auto& [id, c] : s.connections) rules[id].strong = {c.first.pipe, c.second.pipe};
  for (const auto& [id, h] : s.height_marks) rules[id].strong = {h.at.pipe};
  for (const auto& [id, b] : s.blocks) {
    Rule& r = rules[id];
    Group g;
    for (const auto& at : b.attachments) g.members.push_back(at.pipe);
    if (blocks == BlockSurvival::kDeleteAttached) {
      r.strong = g.members;
    } else {
      r.groups.push_back(std::move(g));
    }
  }
  for (const auto& [id, d] : s.dimensions) {
    Group g{{}, 2};
    for (const auto& o : d.origins) g.members.push_back(origin_ref(o));
    rules[id].groups.push_back(std::move(g));
  }
  for (const auto& [id, t] : s.texts) {
    Group g;
    for (const auto& l : t.leaders) g.members.push_back(leader_ref(l));
    rules[id].groups.push_back(std::move(g));
  }
  for (const auto& [id, pd] : s.designators) {
    Rule& r = rules[id];
    r.strong = {pd.target};
    Group g;
    for (const auto& l : pd.leaders) g.members.push_back(leader_ref(l));
    r.groups.push_back(std::move(g));
  }
  for (const auto& [id, o] : s.offsets) {
    Rule& r = rules[id];
    r.strong = {o.anchor.pipe};
    if (o.kind == OffsetKind::kLocal && o.scope_pipe && s.pipes.count(*o.scope_pipe)) {
      const IdSet branch = branch_of(s, *o.scope_pipe);
      r.groups.push_back({std::vector<ObjectId>(branch.begin(), branch.end()), 1});
    }
  }
  return rules;
}

}  // namespace

IdSet reference_closure(const Scheme& scheme, const IdSet& seed, BlockSurvival blocks) {
  for (ObjectId id : seed) {
    if (!scheme.contains(id)) fail(ErrorCode::kUnknownId, "no object with id " + std::to_string(id));
  }
  const auto rules = build_rules(scheme, blocks);

  // Reverse index: target id -> (dependent object, group index or -1 for strong).
  std::map<ObjectId, std::vector<std::pair<ObjectId, int>>> dependents;
  std::map<ObjectId, std::vector<int>> alive;
  for (const auto& [id, rule] : rules) {
    for (ObjectId t : rule.strong) dependents[t].push_back({id, -1});
    auto& counts = alive[id];
    for (std::size_t g = 0; g < rule.groups.size(); ++g) {
      counts.push_back(static_cast<int>(rule.groups[g].members.size()));
      for (ObjectId t : rule.groups[g].members) dependents[t].push_back({id, static_cast<int>(g)});
    }
  }

  IdSet closed = seed;
  std::deque<ObjectId> queue(seed.begin(), seed.end());
  auto join = [&](ObjectId id) {
    if (closed.insert(id).second) queue.push_back(id);
  };
  for (const auto& [id, rule] : rules) {
    for (std::size_t g = 0; g < rule.groups.size(); ++g) {
      if (alive[id][g] < rule.groups[g].min_alive) join(id);
    }
  }

  while (!queue.empty()) {
    const ObjectId gone = queue.front();
    queue.pop_front();
    auto it = dependents.find(gone);
    if (it == dependents.end()) continue;
    for (const auto& [dep, g] : it->second) {
      if (closed.count(dep)) continue;
      if (g < 0) {
        join(dep);
        continue;
      }
      int& count = alive[dep][static_cast<std::size_t>(g)];
      if (--count < rules.at(dep).groups[static_cast<std::size_t>(g)].min_alive) join(dep);
    }
  }
  return closed;
}

namespace {

void prune_leaders(std::vector<Leader>& leaders, int& main_leader, const IdSet& gone) {
  std::vector<Leader> kept;
  int new_main = -1;
  for (std::size_t i = 0; i < leaders.size(); ++i) {
    if (gone.count(leader_ref(leaders[i]))) continue;
    if (static_cast<int>(i) == main_leader) new_main = static_cast<int>(kept.size());
    kept.push_back(leaders[i]);
  }
  leaders = std::move(kept);
  main_leader = new_main < 0 ? 0 : new_main;
}

}  // namespace

DeletionReport delete_closed_set(Scheme& s, const IdSet& closed) {
  DeletionReport report;
  report.deleted = closed;

  // Scope branches are taken before the pipes disappear.
  std::map<ObjectId, IdSet> old_scopes;
  for (const auto& [id, o] : s.offsets) {
    if (!closed.count(id) && o.scope_pipe && closed.count(*o.scope_pipe)) {
      old_scopes[id] = branch_of(s, *o.scope_pipe);
    }
  }

  auto erase_from = [&closed](auto& map) {
    for (auto it = map.begin(); it != map.end();) {
      it = closed.count(it->first) ? map.erase(it) : std::next(it);
    }
  };
  erase_from(s.pipes);
  erase_from(s.connections);
  erase_from(s.blocks);
  erase_from(s.dimensions);
  erase_from(s.texts);
  erase_from(s.designators);
  erase_from(s.height_marks);
  erase_from(s.offsets);
  erase_from(s.grids);

  for (auto& [_, p] : s.pipes) {
    if (p.designator && closed.count(*p.designator)) p.designator.reset();
  }
  for (auto& [_, b] : s.blocks) {
    if (b.designator && closed.count(*b.designator)) b.designator.reset();
    std::erase_if(b.attachments, [&](const BlockAttachment& a) { return closed.count(a.pipe) > 0; });
  }
  for (auto& [_, d] : s.dimensions) {
    std::erase_if(d.origins, [&](const DimOrigin& o) { return closed.count(origin_ref(o)) > 0; });
  }
  for (auto& [_, t] : s.texts) prune_leaders(t.leaders, t.main_leader, closed);
  for (auto& [_, pd] : s.designators) prune_leaders(pd.leaders, pd.main_leader, closed);
  for (auto& [id, o] : s.offsets) {
    std::erase_if(o.broken_pipes, [&](const PipePoint& p) { return closed.count(p.pipe) > 0; });
    auto it = old_scopes.find(id);
    if (it == old_scopes.end()) continue;
    for (ObjectId p : it->second) {
      if (!closed.count(p)) {
        o.scope_pipe = p;
        break;
      }
    }
    report.warnings.push_back("offset " + std::to_string(id) + " scope moved to pipe " +
                              std::to_string(*o.scope_pipe));
  }
  return report;
}

std::string_view violation_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kDanglingRef: return "DanglingRef";
    case ViolationKind::kDuplicateId: return "DuplicateId";
    case ViolationKind::kIdNotAllocated: return "IdNotAllocated";
    case ViolationKind::kNonFinite: return "NonFinite";
    case ViolationKind::kZeroLengthPipe: return "ZeroLengthPipe";
    case ViolationKind::kEndsNotCoincident: return "EndsNotCoincident";
    case ViolationKind::kSamePipeConnection: return "SamePipeConnection";
    case ViolationKind::kDuplicateConnection: return "DuplicateConnection";
    case ViolationKind::kUnknownSymbol: return "UnknownSymbol";
    case ViolationKind::kBadAttachment: return "BadAttachment";
    case ViolationKind::kFrameNotOrthonormal: return "FrameNotOrthonormal";
    case ViolationKind::kBlockOffPipe: return "BlockOffPipe";
    case ViolationKind::kCutOutOfRange: return "CutOutOfRange";
    case ViolationKind::kCutOverlap: return "CutOverlap";
    case ViolationKind::kTooFewOrigins: return "TooFewOrigins";
    case ViolationKind::kNoLeaders: return "NoLeaders";
    case ViolationKind::kBadMainLeader: return "BadMainLeader";
    case ViolationKind::kBadParameter: return "BadParameter";
    case ViolationKind::kBadPositions: return "BadPositions";
    case ViolationKind::kDesignatorMismatch: return "DesignatorMismatch";
    case ViolationKind::kBadOffset: return "BadOffset";
    case ViolationKind::kBadGrid: return "BadGrid";
    case ViolationKind::kMissingVisibility: return "MissingVisibility";
  }
  return "";
}

namespace {

constexpr double kParamTolerance = 1e-9;

class Checker {
 public:
  explicit Checker(const Scheme& s) : s_(s) {}

  std::vector<Violation> run() {
    check_ids();
    check_pipes();
    check_connections();
    check_blocks();
    check_dimensions();
    for (const auto& [id, t] : s_.texts) check_leaders(id, t.leaders, t.main_leader);
    check_designators();
    check_marks();
    check_offsets();
    check_grids();
    for (ObjectClass c : kAllObjectClasses) {
      if (!s_.settings.visibility.count(c)) {
        add(ViolationKind::kMissingVisibility, 0, std::string(object_class_name(c)));
      }
    }
    return std::move(out_);
  }

 private:
  void add(ViolationKind kind, ObjectId id, std::string detail) { out_.push_back({kind, id, std::move(detail)}); }

  bool pipe_live(ObjectId owner, ObjectId pipe) {
    if (s_.pipes.count(pipe)) return true;
    add(ViolationKind::kDanglingRef, owner, "pipe " + std::to_string(pipe));
    return false;
  }

  bool block_live(ObjectId owner, ObjectId block) {
    if (s_.blocks.count(block)) return true;
    add(ViolationKind::kDanglingRef, owner, "block " + std::to_string(block));
    return false;
  }

  void check_param(ObjectId owner, double t) {
    if (!(t >= -kParamTolerance && t <= 1.0 + kParamTolerance)) {
      add(ViolationKind::kBadParameter, owner, "parameter " + std::to_string(t));
    }
  }

  void check_ids() {
    std::map<ObjectId, int> seen;
    for (ObjectId id : s_.all_ids()) seen[id] = 0;
    auto count = [&seen](const auto& map) {
      for (const auto& [id, obj] : map) {
        ++seen[id];
        (void)obj;
      }
    };
    count(s_.pipes);
    count(s_.connections);
    count(s_.blocks);
    count(s_.dimensions);
    count(s_.texts);
    count(s_.designators);
    count(s_.height_marks);
    count(s_.offsets);
    count(s_.grids);
    for (const auto& [id, n] : seen) {
      if (n > 1) add(ViolationKind::kDuplicateId, id, "id used by " + std::to_string(n) + " objects");
      if (id == 0 || id >= s_.next_id) add(ViolationKind::kIdNotAllocated, id, "id beyond counter");
    }
  }

  void check_pipes() {
    for (const auto& [id, p] : s_.pipes) {
      if (p.id != id) add(ViolationKind::kDuplicateId, id, "stored id mismatch");
      if (!is_finite(p.a) || !is_finite(p.b)) {
        add(ViolationKind::kNonFinite, id, "pipe coordinates");
        continue;
      }
      if (coincident(p.a, p.b)) add(ViolationKind::kZeroLengthPipe, id, "");
      if (p.designator) {
        auto it = s_.designators.find(*p.designator);
        if (it == s_.designators.end()) {
          add(ViolationKind::kDanglingRef, id, "designator " + std::to_string(*p.designator));
        } else if (it->second.target != id) {
          add(ViolationKind::kDesignatorMismatch, id, "designator targets another element");
        }
      }
    }
  }

  void check_connections() {
    std::set<std::pair<PipeEndRef, PipeEndRef>> pairs;
    for (const auto& [id, c] : s_.connections) {
      const bool a = pipe_live(id, c.first.pipe);
      const bool b = pipe_live(id, c.second.pipe);
      if (c.first.pipe == c.second.pipe) add(ViolationKind::kSamePipeConnection, id, "");
      auto key = std::minmax(c.first, c.second);
      if (!pairs.insert({key.first, key.second}).second) add(ViolationKind::kDuplicateConnection, id, "");
      if (a && b && !coincident(end_point(s_, c.first), end_point(s_, c.second))) {
        add(ViolationKind::kEndsNotCoincident, id, "");
      }
    }
  }

  void check_blocks() {
    for (const auto& [id, b] : s_.blocks) {
      auto sym = s_.symbols.find(b.symbol);
      if (sym == s_.symbols.end()) {
        add(ViolationKind::kUnknownSymbol, id, b.symbol);
        continue;
      }
      const SymbolDef& def = sym->second;
      if (!is_finite(b.position)) add(ViolationKind::kNonFinite, id, "block position");
      if (!is_orthonormal(b.frame)) add(ViolationKind::kFrameNotOrthonormal, id, "");
      const int arity = attachment_arity(def.attachment);
      if (b.attachments.empty() || static_cast<int>(b.attachments.size()) > arity) {
        add(ViolationKind::kBadAttachment, id, "attachment count " + std::to_string(b.attachments.size()));
      }
      std::set<int> slots;
      std::set<ObjectId> pipes;
      bool live = true;
      for (const auto& at : b.attachments) {
        if (at.slot < 0 || at.slot >= arity || !slots.insert(at.slot).second || !pipes.insert(at.pipe).second) {
          add(ViolationKind::kBadAttachment, id, "slot " + std::to_string(at.slot));
        }
        live = pipe_live(id, at.pipe) && live;
      }
      if (b.designator) {
        auto it = s_.designators.find(*b.designator);
        if (it == s_.designators.end()) {
          add(ViolationKind::kDanglingRef, id, "designator " + std::to_string(*b.designator));
        } else if (it->second.target != id) {
          add(ViolationKind::kDesignatorMismatch, id, "designator targets another element");
        }
      }
      if (!live) continue;
      for (const auto& at : b.attachments) {
        const Pipe& p = s_.pipe(at.pipe);
        bool on_pipe = false;
        if (def.attachment.kind == AttachmentKind::kAxial) {
          const double t = project_parameter(p.a, p.b, b.position);
          on_pipe = t >= -kParamTolerance && t <= 1.0 + kParamTolerance && coincident(p.at(t), b.position);
        } else {
          on_pipe = coincident(p.a, b.position) || coincident(p.b, b.position);
        }
        if (!on_pipe) add(ViolationKind::kBlockOffPipe, id, "pipe " + std::to_string(at.pipe));
      }
    }
    // Cut intervals per pipe.
    std::map<ObjectId, std::vector<CutInterval>> by_pipe;
    for (const auto& [id, b] : s_.blocks) {
      if (!s_.symbols.count(b.symbol)) continue;
      bool live = true;
      for (const auto& at : b.attachments) live = live && s_.pipes.count(at.pipe);
      if (!live) continue;
      for (const CutInterval& c : block_cuts(s_, b)) by_pipe[c.pipe].push_back(c);
    }
    for (auto& [pipe, cuts] : by_pipe) {
      std::sort(cuts.begin(), cuts.end(), [](auto& x, auto& y) { return x.t0 < y.t0; });
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i].t0 < -kParamTolerance || cuts[i].t1 > 1.0 + kParamTolerance) {
          add(ViolationKind::kCutOutOfRange, cuts[i].block, "pipe " + std::to_string(pipe));
        }
        if (i > 0 && cuts[i].t0 < cuts[i - 1].t1 - kParamTolerance) {
          add(ViolationKind::kCutOverlap, cuts[i].block, "pipe " + std::to_string(pipe));
        }
      }
    }
  }

  void check_dimensions() {
    for (const auto& [id, d] : s_.dimensions) {
      if (d.origins.size() < 2) add(ViolationKind::kTooFewOrigins, id, std::to_string(d.origins.size()));
      if (d.side != 1 && d.side != -1) add(ViolationKind::kBadParameter, id, "side");
      for (const auto& o : d.origins) {
        if (const auto* e = std::get_if<PipeEndRef>(&o)) {
          pipe_live(id, e->pipe);
        } else {
          const auto& ref = std::get<BlockPointRef>(o);
          if (block_live(id, ref.block)) {
            const BlockInstance& b = s_.block(ref.block);
            auto sym = s_.symbols.find(b.symbol);
            if (sym != s_.symbols.end() &&
                (ref.slot < 0 || ref.slot >= attachment_arity(sym->second.attachment))) {
              add(ViolationKind::kBadAttachment, id, "origin slot " + std::to_string(ref.slot));
            }
          }
        }
      }
    }
  }

  void check_leaders(ObjectId id, const std::vector<Leader>& leaders, int main_leader) {
    if (leaders.empty()) add(ViolationKind::kNoLeaders, id, "");
    if (main_leader < 0 || main_leader >= static_cast<int>(std::max<std::size_t>(leaders.size(), 1))) {
      add(ViolationKind::kBadMainLeader, id, std::to_string(main_leader));
    }
    for (const auto& l : leaders) {
      if (!is_finite(l.anchor)) add(ViolationKind::kNonFinite, id, "leader anchor");
      if (const auto* pp = std::get_if<PipePoint>(&l.target)) {
        if (pipe_live(id, pp->pipe)) check_param(id, pp->t);
      } else {
        block_live(id, std::get<BlockRef>(l.target).block);
      }
    }
  }

  void check_designators() {
    for (const auto& [id, pd] : s_.designators) {
      check_leaders(id, pd.leaders, pd.main_leader);
      std::set<int> unique(pd.positions.begin(), pd.positions.end());
      const bool positive = std::all_of(pd.positions.begin(), pd.positions.end(), [](int n) { return n > 0; });
      if (pd.positions.empty() || pd.positions.size() > 5 || unique.size() != pd.positions.size() || !positive) {
        add(ViolationKind::kBadPositions, id, "");
      }
      std::optional<ObjectId> back;
      if (auto p = s_.pipes.find(pd.target); p != s_.pipes.end()) {
        back = p->second.designator;
      } else if (auto b = s_.blocks.find(pd.target); b != s_.blocks.end()) {
        back = b->second.designator;
      } else {
        add(ViolationKind::kDanglingRef, id, "target " + std::to_string(pd.target));
        continue;
      }
      if (back != id) add(ViolationKind::kDesignatorMismatch, id, "target does not carry this designator");
    }
  }

  void check_marks() {
    for (const auto& [id, h] : s_.height_marks) {
      if (pipe_live(id, h.at.pipe)) check_param(id, h.at.t);
      if (!std::isfinite(h.level)) add(ViolationKind::kNonFinite, id, "level");
    }
  }

  void check_offsets() {
    for (const auto& [id, o] : s_.offsets) {
      if (pipe_live(id, o.anchor.pipe)) check_param(id, o.anchor.t);
      if (o.half_space_sign != 1 && o.half_space_sign != -1) add(ViolationKind::kBadOffset, id, "sign");
      if (!is_finite(o.paper_shift) || norm(o.paper_shift) == 0.0) add(ViolationKind::kBadOffset, id, "shift");
      for (const auto& bp : o.broken_pipes) {
        if (pipe_live(id, bp.pipe)) check_param(id, bp.t);
      }
      if (o.kind == OffsetKind::kLocal) {
        if (!o.scope_pipe) {
          add(ViolationKind::kBadOffset, id, "local offset without scope");
        } else {
          pipe_live(id, *o.scope_pipe);
        }
      }
    }
  }

  void check_grids() {
    for (const auto& [id, g] : s_.grids) {
      std::set<std::string> labels;
      for (const auto& axis : g.axes) {
        if (!labels.insert(axis.label).second || !std::isfinite(axis.offset)) {
          add(ViolationKind::kBadGrid, id, axis.label);
        }
      }
      if (g.axes.empty()) add(ViolationKind::kBadGrid, id, "empty");
    }
  }

  const Scheme& s_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> integrity_check(const Scheme& scheme) { return Checker(scheme).run(); }

}  // namespace axon
