#pragma once

#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "axon/scheme.hpp"

namespace axon {

// Runs op against a copy of the scheme and commits only if it returns
// normally, so every operation is all-or-nothing on error.
template <class Op>
auto atomically(Scheme& scheme, Op&& op) {
  Scheme work = scheme;
  if constexpr (std::is_void_v<std::invoke_result_t<Op, Scheme&>>) {
    std::forward<Op>(op)(work);
    scheme = std::move(work);
  } else {
    auto result = std::forward<Op>(op)(work);
    scheme = std::move(work);
    return result;
  }
}

// Throws ZeroLengthPipe when the ends coincide.
ObjectId add_pipe(Scheme& scheme, Point3 a, Point3 b);

// Pairwise link of two coincident ends of distinct pipes.
// Throws NotCoincident, AlreadyConnected, SamePipe, UnknownId.
ObjectId connect_ends(Scheme& scheme, PipeEndRef e1, PipeEndRef e2);
void disconnect_ends(Scheme& scheme, ObjectId connection);

// How blocks react when one of their pipes is deleted. kPrune keeps a block
// while any attachment survives; kDeleteAttached removes it outright.
enum class BlockSurvival { kPrune, kDeleteAttached };

// Smallest superset of seed whose removal leaves no dangling reference.
// Dimensions, texts, designators and blocks survive by losing the references
// into the set as long as enough of them remain. Throws UnknownId.
IdSet reference_closure(const Scheme& scheme, const IdSet& seed, BlockSurvival blocks = BlockSurvival::kPrune);

struct DeletionReport {
  IdSet deleted;
  std::vector<std::string> warnings;
};

// Removes a closed set and prunes the references survivors held into it.
DeletionReport delete_closed_set(Scheme& scheme, const IdSet& closed);

enum class ViolationKind {
  kDanglingRef,
  kDuplicateId,
  kIdNotAllocated,
  kNonFinite,
  kZeroLengthPipe,
  kEndsNotCoincident,
  kSamePipeConnection,
  kDuplicateConnection,
  kUnknownSymbol,
  kBadAttachment,
  kFrameNotOrthonormal,
  kBlockOffPipe,
  kCutOutOfRange,
  kCutOverlap,
  kTooFewOrigins,
  kNoLeaders,
  kBadMainLeader,
  kBadParameter,
  kBadPositions,
  kDesignatorMismatch,
  kBadOffset,
  kBadGrid,
  kMissingVisibility,
};

std::string_view violation_name(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  ObjectId object = 0;
  std::string detail;
};

// Empty iff every type invariant and referential closure hold.
std::vector<Violation> integrity_check(const Scheme& scheme);

}  // namespace axon
