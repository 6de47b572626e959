#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ae {

enum class ErrorCode {
  // geometry
  PixelOutOfBounds,
  RayParallelToPlane,
  IntersectionBehindCamera,
  DegenerateProjection,
  // catalog
  DuplicateTypeId,
  AsymmetricRule,
  MalformedDocument,
  UnknownType,
  UnknownPort,
  // twin
  NonMonotonicFrame,
  UnknownClass,
  // planner
  EmptyModel,
  OverlappingPlacements,
  DisconnectedModel,
  UnknownBase,
  Overlap,
  NoCompatibleConnection,
  InventoryExhausted,
  PlanComplete,
  // replanner
  InfeasibleGoals,
  BudgetExceeded,
  UnknownInstance,
  WouldDisconnect,
  NoPendingCandidates,
  IndexOutOfRange,
  Cancelled,
  // sim
  FrameOutOfRange,
  NoScript,
  // service
  ScenarioInvalid,
  ReplayDiverged,
  MalformedMessage,
  SessionNotLoaded,
  VersionMismatch,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail = {});

} // namespace ae
