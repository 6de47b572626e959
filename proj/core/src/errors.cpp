#include "assembly_engine/errors.hpp"

namespace ae {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::PixelOutOfBounds: return "PixelOutOfBounds";
  case ErrorCode::RayParallelToPlane: return "RayParallelToPlane";
  case ErrorCode::IntersectionBehindCamera: return "IntersectionBehindCamera";
  case ErrorCode::DegenerateProjection: return "DegenerateProjection";
  case ErrorCode::DuplicateTypeId: return "DuplicateTypeId";
  case ErrorCode::AsymmetricRule: return "AsymmetricRule";
  case ErrorCode::MalformedDocument: return "MalformedDocument";
  case ErrorCode::UnknownType: return "UnknownType";
  case ErrorCode::UnknownPort: return "UnknownPort";
  case ErrorCode::NonMonotonicFrame: return "NonMonotonicFrame";
  case ErrorCode::UnknownClass: return "UnknownClass";
  case ErrorCode::EmptyModel: return "EmptyModel";
  case ErrorCode::OverlappingPlacements: return "OverlappingPlacements";
  case ErrorCode::DisconnectedModel: return "DisconnectedModel";
  case ErrorCode::UnknownBase: return "UnknownBase";
  case ErrorCode::Overlap: return "Overlap";
  case ErrorCode::NoCompatibleConnection: return "NoCompatibleConnection";
  case ErrorCode::InventoryExhausted: return "InventoryExhausted";
  case ErrorCode::PlanComplete: return "PlanComplete";
  case ErrorCode::InfeasibleGoals: return "InfeasibleGoals";
  case ErrorCode::BudgetExceeded: return "BudgetExceeded";
  case ErrorCode::UnknownInstance: return "UnknownInstance";
  case ErrorCode::WouldDisconnect: return "WouldDisconnect";
  case ErrorCode::NoPendingCandidates: return "NoPendingCandidates";
  case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorCode::Cancelled: return "Cancelled";
  case ErrorCode::FrameOutOfRange: return "FrameOutOfRange";
  case ErrorCode::NoScript: return "NoScript";
  case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
  case ErrorCode::ReplayDiverged: return "ReplayDiverged";
  case ErrorCode::MalformedMessage: return "MalformedMessage";
  case ErrorCode::SessionNotLoaded: return "SessionNotLoaded";
  case ErrorCode::VersionMismatch: return "VersionMismatch";
  case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what.empty() ? std::string(to_string(code))
                                      : std::string(to_string(code)) + ": " + what),
      code_(code) {}

void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

} // namespace ae
