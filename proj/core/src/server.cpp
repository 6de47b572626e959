#include "assembly_engine/server.hpp"

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/protocol.hpp"

namespace ae {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

std::pair<std::string, unsigned short> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    fail(ErrorCode::MalformedMessage, "bind address must be host:port");
  }
  std::string host = bind.substr(0, colon);
  if (host.empty()) {
    host = "127.0.0.1";
  }
  int port = -1;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) {
    fail(ErrorCode::MalformedMessage, "bad port in '" + bind + "'");
  }
  return {host, static_cast<unsigned short>(port)};
}

namespace {

void serve_connection(tcp::socket socket, std::string session_id,
                      std::optional<std::filesystem::path> root) {
  try {
    websocket::stream<tcp::socket> ws(std::move(socket));
    ws.accept();
    ws.text(true);
    ProtocolEndpoint endpoint(session_id, std::move(root));
    spdlog::info("session {} connected", session_id);
    for (;;) {
      beast::flat_buffer buffer;
      ws.read(buffer);
      for (const auto& reply : endpoint.handle(beast::buffers_to_string(buffer.data()))) {
        ws.write(net::buffer(reply));
      }
    }
  } catch (const beast::system_error& e) {
    if (e.code() != websocket::error::closed) {
      spdlog::debug("session {} ended: {}", session_id, e.code().message());
    }
  } catch (const std::exception& e) {
    spdlog::warn("session {} failed: {}", session_id, e.what());
  }
  spdlog::info("session {} closed", session_id);
}

} // namespace

struct Server::Impl {
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::optional<std::filesystem::path> root;
  std::atomic<bool> stopping{false};
  std::mutex mutex;
  std::vector<std::thread> connections;
  std::string host;
};

Server::Server(const std::string& host, unsigned short port,
               std::optional<std::filesystem::path> scenario_root)
    : impl_(std::make_unique<Impl>()) {
  impl_->root = std::move(scenario_root);
  impl_->host = host;
  try {
    const tcp::endpoint endpoint(net::ip::make_address(host), port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen();
  } catch (const std::exception& e) {
    fail(ErrorCode::IoFailure, std::string("bind ") + host + ":" + std::to_string(port) + ": " +
                                   e.what());
  }
}

Server::~Server() {
  stop();
  std::lock_guard lock(impl_->mutex);
  for (auto& t : impl_->connections) {
    if (t.joinable()) {
      t.join();
    }
  }
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  spdlog::info("listening on {}:{}", impl_->host, port());
  std::uint64_t next_id = 0;
  while (!impl_->stopping) {
    tcp::socket socket(impl_->ioc);
    boost::system::error_code ec;
    impl_->acceptor.accept(socket, ec);
    if (ec || impl_->stopping) {
      break;
    }
    std::lock_guard lock(impl_->mutex);
    impl_->connections.emplace_back(serve_connection, std::move(socket),
                                    "s" + std::to_string(next_id++), impl_->root);
  }
}

void Server::stop() {
  if (impl_->stopping.exchange(true)) {
    return;
  }
  // A blocking accept only returns on a connection, so make one.
  try {
    net::io_context ioc;
    tcp::socket poke(ioc);
    boost::system::error_code ec;
    poke.connect(tcp::endpoint(net::ip::make_address(impl_->host == "0.0.0.0" ? "127.0.0.1"
                                                                               : impl_->host),
                               port()),
                 ec);
  } catch (const std::exception&) {
  }
  boost::system::error_code ec;
  impl_->acceptor.close(ec);
}

} // namespace ae
