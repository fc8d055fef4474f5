#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace axon {

// Every kernel failure carries one of these codes. The string form returned by
// error_code_name() is stable and is what the script transcript and the HTTP
// service report.
enum class ErrorCode {
  kInvalidArgument,
  kUnknownId,
  kZeroLengthPipe,
  kBadStep,
  kBadProjection,
  kUnknownProjection,
  kDegenerateLine,
  kBadInterval,
  kDirParallelToPipe,
  kEndConnected,
  kOffAxis,
  kScopeForbidden,
  kNotCoincident,
  kAlreadyConnected,
  kSamePipe,
  kBadParameter,
  kPointOccupied,
  kNoContinuation,
  kJunctionLocked,
  kAmbiguousSide,
  kDesignatorConflict,
  kNoConnections,
  kNotClosed,
  kOffPipe,
  kDoesNotFit,
  kNotCrossing,
  kDegenerateAxis,
  kNoHostPipe,
  kRaysIncompatible,
  kCutCollision,
  kNoFreeSlot,
  kAngleTooLarge,
  kNotAtBlock,
  kUnknownSymbol,
  kTooFewOrigins,
  kVariantNotAdmissible,
  kOnlyOneLeader,
  kAlreadyMain,
  kDuplicateNumber,
  kWrongPositionCount,
  kUnknownCatalogCode,
  kNoDesignator,
  kParseError,
  kDuplicateCode,
  kStaleToken,
  kIoError,
  kVersionMismatch,
  kPortInUse,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<int> line = std::nullopt);

  ErrorCode code() const { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }
  // Source line for parse and script errors, 1-based.
  std::optional<int> line() const { return line_; }

 private:
  ErrorCode code_;
  std::optional<int> line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }
[[noreturn]] inline void fail(ErrorCode code, const std::string& message, int line) {
  throw Error(code, message, line);
}

}  // namespace axon
