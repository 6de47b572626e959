#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/session.hpp"

namespace ae {

inline constexpr int kProtocolSchemaVersion = 1;

/// Wire envelope: {"type": ..., "seq": n, "payload": {...}}.
struct Envelope {
  std::string type;
  std::int64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();
};

nlohmann::json to_json(const Envelope& e);
/// Errors: MalformedMessage.
Envelope envelope_from_text(const std::string& text);

/// Transport-independent protocol state for one connection and its session.
///
/// The first client message must be `hello` carrying the schema_version. Every
/// later message must carry seq = previous + 1. Replies carry their own
/// strictly increasing seq. Failures never throw; they become `error` replies.
class ProtocolEndpoint {
public:
  explicit ProtocolEndpoint(std::string session_id = "local",
                            std::optional<std::filesystem::path> scenario_root = std::nullopt);

  std::vector<std::string> handle(const std::string& text);

  const Session& session() const { return session_; }
  bool greeted() const { return last_client_seq_.has_value(); }

private:
  std::string emit(const std::string& type, nlohmann::json payload);
  std::string error(ErrorCode code, const std::string& message);

  Session session_;
  std::optional<std::filesystem::path> scenario_root_;
  std::optional<std::int64_t> last_client_seq_;
  std::int64_t next_server_seq_ = 0;
};

} // namespace ae
