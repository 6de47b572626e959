#include "assembly_engine/protocol.hpp"

#include "assembly_engine/errors.hpp"
#include "assembly_engine/scenario_io.hpp"

namespace ae {

using json = nlohmann::json;

json to_json(const Envelope& e) { return {{"type", e.type}, {"seq", e.seq}, {"payload", e.payload}}; }

Envelope envelope_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedMessage, e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string() || !j.contains("seq") ||
      !j.at("seq").is_number_integer()) {
    fail(ErrorCode::MalformedMessage, "envelope needs a string type and an integer seq");
  }
  Envelope e;
  e.type = j.at("type").get<std::string>();
  e.seq = j.at("seq").get<std::int64_t>();
  if (j.contains("payload")) {
    e.payload = j.at("payload");
    if (!e.payload.is_object()) {
      fail(ErrorCode::MalformedMessage, "payload must be an object");
    }
  }
  return e;
}

ProtocolEndpoint::ProtocolEndpoint(std::string session_id,
                                   std::optional<std::filesystem::path> scenario_root)
    : session_(std::move(session_id)), scenario_root_(std::move(scenario_root)) {}

std::string ProtocolEndpoint::emit(const std::string& type, json payload) {
  return to_json(Envelope{type, next_server_seq_++, std::move(payload)}).dump();
}

std::string ProtocolEndpoint::error(ErrorCode code, const std::string& message) {
  return emit("error", {{"code", std::string(to_string(code))}, {"message", message}});
}

std::vector<std::string> ProtocolEndpoint::handle(const std::string& text) {
  std::vector<std::string> out;
  Envelope msg;
  try {
    msg = envelope_from_text(text);
  } catch (const Error& e) {
    out.push_back(error(e.code(), e.what()));
    return out;
  }

  if (!last_client_seq_) {
    if (msg.type != "hello") {
      out.push_back(error(ErrorCode::MalformedMessage, "first message must be hello"));
      return out;
    }
    const int version = msg.payload.value("schema_version", -1);
    if (version != kProtocolSchemaVersion) {
      out.push_back(error(ErrorCode::VersionMismatch,
                          "server speaks schema_version " + std::to_string(kProtocolSchemaVersion)));
      return out;
    }
    last_client_seq_ = msg.seq;
    out.push_back(emit("hello", {{"schema_version", kProtocolSchemaVersion},
                                 {"session_id", session_.id()}}));
    return out;
  }
  if (msg.seq != *last_client_seq_ + 1) {
    out.push_back(error(ErrorCode::MalformedMessage,
                        "expected seq " + std::to_string(*last_client_seq_ + 1) + ", got " +
                            std::to_string(msg.seq)));
    return out;
  }
  last_client_seq_ = msg.seq;

  try {
    Command command{msg.type, msg.payload};
    if (msg.type == "hello") {
      fail(ErrorCode::MalformedMessage, "hello already received");
    }
    if (msg.type == "load_scenario" && msg.payload.contains("path")) {
      // Resolve a scenario file into the inline form the log records.
      std::filesystem::path path = msg.payload.at("path").get<std::string>();
      if (scenario_root_) {
        if (path.is_absolute() || path.lexically_normal().string().rfind("..", 0) == 0) {
          fail(ErrorCode::ScenarioInvalid, "scenario path must stay under the scenario root");
        }
        path = *scenario_root_ / path;
      }
      command.payload = {{"scenario", scenario_to_json(load_scenario_file(path))}};
    }
    for (auto& ev : session_.apply(command)) {
      out.push_back(emit(ev.type, std::move(ev.payload)));
    }
  } catch (const Error& e) {
    out.push_back(error(e.code(), e.what()));
  } catch (const json::exception& e) {
    out.push_back(error(ErrorCode::MalformedMessage, e.what()));
  }
  return out;
}

} // namespace ae
