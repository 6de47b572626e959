#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "assembly_engine/session.hpp"

namespace ae {

inline constexpr int kReplaySchemaVersion = 1;

/// JSON Lines: a header line, then one command per line.
struct ReplayLog {
  std::string session_id;
  std::size_t event_count = 0;
  std::uint64_t final_state_hash = 0;
  std::vector<Command> commands;
};

std::string export_log(const Session& session);
/// Errors: IoFailure.
void export_log_file(const Session& session, const std::filesystem::path& path);

/// Parses and checks the line count against the header. Errors: ReplayDiverged.
ReplayLog import_log(const std::string& text);
ReplayLog import_log_file(const std::filesystem::path& path);

/// Folds the commands into a fresh session.
Session replay(const ReplayLog& log);

/// Replays and compares the final state hash. Errors: ReplayDiverged.
std::uint64_t verify_log(const ReplayLog& log);

} // namespace ae
