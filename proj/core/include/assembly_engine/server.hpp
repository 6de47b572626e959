#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace ae {

/// "host:port" or ":port". Errors: MalformedMessage.
std::pair<std::string, unsigned short> parse_bind(const std::string& bind);

/// WebSocket endpoint: one session per connection, one protocol text message
/// per frame. Each connection is served on its own thread; sessions share
/// nothing.
class Server {
public:
  /// Binds immediately; port 0 picks a free port. Errors: IoFailure.
  Server(const std::string& host, unsigned short port,
         std::optional<std::filesystem::path> scenario_root = std::nullopt);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  /// Accepts connections until stop().
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace ae
