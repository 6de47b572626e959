#include "assembly_engine/replay.hpp"

#include <fstream>
#include <sstream>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/scenario_io.hpp"

namespace ae {

using json = nlohmann::json;

std::string export_log(const Session& session) {
  std::ostringstream out;
  const json header{{"schema_version", kReplaySchemaVersion},
                    {"kind", "assembly_engine_replay"},
                    {"session_id", session.id()},
                    {"event_count", session.log().size()},
                    {"final_state_hash", hex64(session.state_hash())}};
  out << header.dump() << '\n';
  for (const auto& c : session.log()) {
    out << to_json(c).dump() << '\n';
  }
  return out.str();
}

void export_log_file(const Session& session, const std::filesystem::path& path) {
  write_text_file(path, export_log(session));
}

ReplayLog import_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ReplayLog log;
  try {
    if (!std::getline(in, line)) {
      fail(ErrorCode::ReplayDiverged, "missing header");
    }
    const json header = json::parse(line);
    if (header.value("schema_version", -1) != kReplaySchemaVersion ||
        header.value("kind", std::string()) != "assembly_engine_replay") {
      fail(ErrorCode::ReplayDiverged, "not a replay log of a supported version");
    }
    log.session_id = header.value("session_id", std::string("local"));
    log.event_count = header.at("event_count").get<std::size_t>();
    log.final_state_hash =
        std::stoull(header.at("final_state_hash").get<std::string>(), nullptr, 16);
    while (std::getline(in, line)) {
      if (line.empty()) {
        continue;
      }
      log.commands.push_back(command_from_json(json::parse(line)));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ReplayDiverged) {
      throw;
    }
    fail(ErrorCode::ReplayDiverged, e.what());
  } catch (const std::exception& e) {
    fail(ErrorCode::ReplayDiverged, e.what());
  }
  if (log.commands.size() != log.event_count) {
    fail(ErrorCode::ReplayDiverged, "header promises " + std::to_string(log.event_count) +
                                        " events, found " + std::to_string(log.commands.size()));
  }
  return log;
}

ReplayLog import_log_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return import_log(buf.str());
}

Session replay(const ReplayLog& log) {
  Session session(log.session_id);
  try {
    for (const auto& c : log.commands) {
      session.apply(c);
    }
  } catch (const Error& e) {
    fail(ErrorCode::ReplayDiverged, std::string("command failed on replay: ") + e.what());
  }
  return session;
}

std::uint64_t verify_log(const ReplayLog& log) {
  const Session session = replay(log);
  const std::uint64_t hash = session.state_hash();
  if (hash != log.final_state_hash) {
    fail(ErrorCode::ReplayDiverged,
         "state hash " + hex64(hash) + " != recorded " + hex64(log.final_state_hash));
  }
  return hash;
}

} // namespace ae
