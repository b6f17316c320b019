#pragma once

// HTTP/WebSocket front end for browser clients:
//   POST /api/register|start|answer|finish  JSON body = message payload
//   GET  /api/sessions                     Authorization: user_id:password
//   GET  /api/monitor (WebSocket)          SESSIONS snapshot, then EVENTs
//   GET  /*                                static files from the web root
// Replies are protocol messages encoded as JSON objects.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "quizwright/server/session_manager.hpp"
#include "quizwright/server/tcp_server.hpp"

namespace qw::server {

class HttpGateway {
 public:
  /// Binds immediately; port 0 picks a free port. Throws BindError.
  HttpGateway(SessionManager& manager, std::uint16_t port, std::filesystem::path web_root,
              const std::string& host = "0.0.0.0");
  ~HttpGateway();
  HttpGateway(const HttpGateway&) = delete;
  HttpGateway& operator=(const HttpGateway&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve(int fd);

  SessionManager& manager_;
  std::filesystem::path web_root_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  ConnectionSet connections_;
  std::thread acceptor_;
  std::once_flag stopped_;
};

/// HTTP status for a protocol error code.
int http_status(protocol::ErrorCode code);

/// Splits "user_id:password".
std::optional<std::pair<std::string, std::string>> parse_credentials(std::string_view header);

/// Decodes %XX escapes and '+'. Returns nullopt on a malformed escape.
std::optional<std::string> percent_decode(std::string_view text);

/// Maps a request target to a file under `root`, or nullopt if the target
/// escapes it.
std::optional<std::filesystem::path> static_file_path(const std::filesystem::path& root, std::string_view target);

}  // namespace qw::server
