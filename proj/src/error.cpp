#include "axon/error.hpp"

namespace axon {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kZeroLengthPipe: return "ZeroLengthPipe";
    case ErrorCode::kBadStep: return "BadStep";
    case ErrorCode::kBadProjection: return "BadProjection";
    case ErrorCode::kUnknownProjection: return "UnknownProjection";
    case ErrorCode::kDegenerateLine: return "DegenerateLine";
    case ErrorCode::kBadInterval: return "BadInterval";
    case ErrorCode::kDirParallelToPipe: return "DirParallelToPipe";
    case ErrorCode::kEndConnected: return "EndConnected";
    case ErrorCode::kOffAxis: return "OffAxis";
    case ErrorCode::kScopeForbidden: return "ScopeForbidden";
    case ErrorCode::kNotCoincident: return "NotCoincident";
    case ErrorCode::kAlreadyConnected: return "AlreadyConnected";
    case ErrorCode::kSamePipe: return "SamePipe";
    case ErrorCode::kBadParameter: return "BadParameter";
    case ErrorCode::kPointOccupied: return "PointOccupied";
    case ErrorCode::kNoContinuation: return "NoContinuation";
    case ErrorCode::kJunctionLocked: return "JunctionLocked";
    case ErrorCode::kAmbiguousSide: return "AmbiguousSide";
    case ErrorCode::kDesignatorConflict: return "DesignatorConflict";
    case ErrorCode::kNoConnections: return "NoConnections";
    case ErrorCode::kNotClosed: return "NotClosed";
    case ErrorCode::kOffPipe: return "OffPipe";
    case ErrorCode::kDoesNotFit: return "DoesNotFit";
    case ErrorCode::kNotCrossing: return "NotCrossing";
    case ErrorCode::kDegenerateAxis: return "DegenerateAxis";
    case ErrorCode::kNoHostPipe: return "NoHostPipe";
    case ErrorCode::kRaysIncompatible: return "RaysIncompatible";
    case ErrorCode::kCutCollision: return "CutCollision";
    case ErrorCode::kNoFreeSlot: return "NoFreeSlot";
    case ErrorCode::kAngleTooLarge: return "AngleTooLarge";
    case ErrorCode::kNotAtBlock: return "NotAtBlock";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kTooFewOrigins: return "TooFewOrigins";
    case ErrorCode::kVariantNotAdmissible: return "VariantNotAdmissible";
    case ErrorCode::kOnlyOneLeader: return "OnlyOneLeader";
    case ErrorCode::kAlreadyMain: return "AlreadyMain";
    case ErrorCode::kDuplicateNumber: return "DuplicateNumber";
    case ErrorCode::kWrongPositionCount: return "WrongPositionCount";
    case ErrorCode::kUnknownCatalogCode: return "UnknownCatalogCode";
    case ErrorCode::kNoDesignator: return "NoDesignator";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateCode: return "DuplicateCode";
    case ErrorCode::kStaleToken: return "StaleToken";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kPortInUse: return "PortInUse";
  }
  return "Unknown";
}

namespace {

std::string with_line(const std::string& message, std::optional<int> line) {
  if (!line) return message;
  return "line " + std::to_string(*line) + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<int> line)
    : std::runtime_error(with_line(message, line)), code_(code), line_(line) {}

}  // namespace axon
