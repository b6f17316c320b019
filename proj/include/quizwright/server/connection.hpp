#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "quizwright/protocol.hpp"
#include "quizwright/server/session_manager.hpp"

namespace qw::server {

inline constexpr std::string_view kServerVersion = "quizwright/1.0.0";

/// Protocol state of one client connection, independent of the transport.
/// Replies and pushed events go through `send`, which may be called from
/// other threads once a monitor has subscribed and must therefore be
/// thread-safe and non-blocking.
class ConnectionHandler {
 public:
  using Send = std::function<void(const protocol::Message&)>;

  ConnectionHandler(SessionManager& manager, Send send);
  ~ConnectionHandler();
  ConnectionHandler(const ConnectionHandler&) = delete;
  ConnectionHandler& operator=(const ConnectionHandler&) = delete;

  /// Handles one decoded message. Returns false when the connection should
  /// be closed after the queued replies are written.
  bool handle(const protocol::Message& msg);

  /// Decodes one frame and handles it; decode failures become ERROR replies.
  bool handle_line(std::string_view line);

  std::optional<protocol::Role> role() const noexcept { return role_; }
  bool authenticated() const noexcept { return authenticated_; }

 private:
  void reply_error(protocol::ErrorCode code, const std::string& message);
  void dispatch(const protocol::Message& msg);

  SessionManager& manager_;
  Send send_;
  std::optional<protocol::Role> role_;
  bool authenticated_ = false;
  std::optional<SessionManager::SubscriptionId> subscription_;
};

/// Runs REGISTER, START, ANSWER or FINISH and returns the reply. Used
/// directly by the HTTP gateway, which has no handshake.
protocol::Message handle_student(SessionManager& manager, const protocol::Message& msg);

}  // namespace qw::server
