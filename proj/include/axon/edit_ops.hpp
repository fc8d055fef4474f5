#pragma once

#include <optional>
#include <string>
#include <vector>

#include "axon/scheme.hpp"

namespace axon {

// Every vertex passes snap (radius in model mm) and then orthogonalization
// against the previous vertex; consecutive pipes are connected, the line's
// free ends are not. Throws DegenerateLine.
std::vector<ObjectId> sketch_line(Scheme& scheme, const std::vector<Point3>& vertices, double snap_radius);

// Replaces the pipe by start-a, a-a', a'-b', b'-b, b-end where a' and b' are
// a and b displaced by shift along dir. Throws BadInterval, DirParallelToPipe,
// PointOccupied.
std::vector<ObjectId> insert_elbow(Scheme& scheme, ObjectId pipe, double t_start, double t_end, AxisDir dir,
                                   double shift);

// Moves a free end along the pipe axis. Blocks mirror about the fixed end when
// the pipe turns over and slide toward the nearest end when they stop fitting.
// Throws EndConnected, OffAxis, ZeroLengthPipe, CutCollision.
void extend_pipe(Scheme& scheme, PipeEndRef end, Point3 new_point);

enum class MoveScope { kAllAtPoint, kOnlyThis };

// Throws ScopeForbidden when kOnlyThis is asked for a connected end.
std::vector<ObjectId> move_point(Scheme& scheme, PipeEndRef end, Point3 new_point, MoveScope scope);

// Splits at t and connects the halves to each other and to every pipe end
// lying on the cut point. Throws BadParameter, PointOccupied.
std::vector<ObjectId> cut_pipe(Scheme& scheme, ObjectId pipe, double t);

// Joins the pipe with its connected collinear continuation on the given side.
// Throws NoContinuation, AmbiguousSide, JunctionLocked, DesignatorConflict.
ObjectId merge_pipes(Scheme& scheme, ObjectId pipe, std::optional<End> side = std::nullopt);

struct DeleteResult {
  IdSet deleted;
  std::vector<std::string> warnings;
};

// Deletes the pipe with its connections, every block attached to it, and all
// annotations left without targets.
DeleteResult delete_pipe(Scheme& scheme, ObjectId pipe);

// Deletion set for the seed; blocks on other pipes survive.
IdSet preview_delete_part(const Scheme& scheme, const IdSet& seed);
DeleteResult delete_part(Scheme& scheme, const IdSet& seed);

struct MoveResult {
  IdSet moved;
  std::vector<std::string> warnings;
};

// Translates the pipes and what is positioned only by them. Connections to
// pipes left behind are dropped with a warning.
MoveResult move_part(Scheme& scheme, const IdSet& pipes, Vec3 shift);

// Throws NoConnections when the seed pipe is not connected to anything.
IdSet preview_move_branch(const Scheme& scheme, ObjectId seed);
MoveResult move_branch(Scheme& scheme, ObjectId seed, Vec3 shift);

// Copies the selection count times at k * shift. A single block is copied
// along its host pipe; anything else must be closed under references.
// Throws NotClosed, OffPipe, DoesNotFit, CutCollision.
std::vector<IdSet> replicate(Scheme& scheme, const IdSet& selection, Vec3 shift, int count);

// Throws UnknownId, NotCrossing.
ObjectId set_offset(Scheme& scheme, OffsetSpec spec);

// Shifts every z coordinate by the level change and every height mark with it.
void set_level(Scheme& scheme, ObjectId mark, double new_level);

void move_scheme(Scheme& scheme, Vec2 paper_shift);

// Visibility of an object class on the drawing.
void set_visibility(Scheme& scheme, ObjectClass cls, bool visible);
void set_projection(Scheme& scheme, const Projection& proj);

// ---- applicability, used by object-first editing ----

enum class PickKind { kPipe, kPipeEnd, kBlock, kDimension, kText, kDesignator, kHeightMark };

struct PickTarget {
  PickKind kind = PickKind::kPipe;
  ObjectId id = 0;
  End end = End::kA;  // kPipeEnd only
};

struct OpAvailability {
  std::string verb;
  bool enabled = false;
};

// Every edit operation for the target's kind under its session verb name,
// enabled when its preconditions hold.
std::vector<OpAvailability> applicable_ops(const Scheme& scheme, const PickTarget& target);

}  // namespace axon
