#pragma once

#include <vector>

#include "axon/scheme.hpp"

namespace axon {

// Outcome of locating a symbol under the cursor before it is committed.
struct PlacementPlan {
  Point3 position;
  std::vector<ObjectId> pipes;  // pipes to attach, host or snapped pipe first
  std::vector<OrientationVariant> variants;
  std::vector<std::vector<int>> slots;  // per variant, slot of each pipe
};

// Axial symbols snap to a nearby pipe end (sitting flush against it) or else
// to the nearest pipe body. Angular and tee symbols snap to a pipe end and
// join the extra pipes meeting there. Throws NoHostPipe, RaysIncompatible.
PlacementPlan plan_placement(const Scheme& scheme, const SymbolDef& def, Point3 at, double snap_radius,
                             const std::vector<ObjectId>& extra_pipes = {});

// Places with variant orientation of the plan, registers the definition in
// the scheme and connects every attached pipe pair.
// Throws NoHostPipe, RaysIncompatible, CutCollision, InvalidArgument.
ObjectId place_block(Scheme& scheme, const SymbolDef& def, Point3 at, double snap_radius, int orientation,
                     const std::vector<ObjectId>& extra_pipes = {}, double scale = 1.0);

// Axial placement at an explicit point along the host pipe.
ObjectId place_block_on_pipe(Scheme& scheme, const SymbolDef& def, PipePoint at, int orientation,
                             double scale = 1.0);

// Uses the free slot whose ray is closest to the pipe within 45 degrees. The
// block turns into the plane of its pipes when the new one leaves it.
// Throws NoFreeSlot, AngleTooLarge, NotAtBlock, CutCollision.
void attach_pipe_to_block(Scheme& scheme, ObjectId block, ObjectId pipe);

// Swaps the symbol in place. Surplus attachments go highest slot first along
// with their connections; the nearest admissible frame is kept.
// Throws NotAtBlock, CutCollision.
ObjectId replace_block(Scheme& scheme, ObjectId block, const SymbolDef& def);

// Angle tolerance of the 45 degree attachment rule, radians.
inline constexpr double kAttachAngleTolerance = 1e-6;

}  // namespace axon
