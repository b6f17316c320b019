#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

#include "quizwright/server/session_manager.hpp"

namespace qw::server {

/// The listening port could not be bound.
class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Live client sockets of one listener. stop() shuts every socket down and
/// waits for the handler threads to finish.
class ConnectionSet {
 public:
  /// False once stopping; the caller should close the socket itself.
  bool add(int fd);
  void remove(int fd);
  void stop();
  bool stopping() const noexcept { return stopping_; }

 private:
  std::mutex mutex_;
  std::condition_variable idle_;
  std::set<int> fds_;
  std::atomic<bool> stopping_{false};
};

/// Newline-framed protocol listener, one thread per connection.
class TcpServer {
 public:
  /// Binds and listens immediately; port 0 picks a free port. Throws
  /// BindError.
  TcpServer(SessionManager& manager, std::uint16_t port, const std::string& host = "0.0.0.0");
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve(int fd);

  SessionManager& manager_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  ConnectionSet connections_;
  std::thread acceptor_;
  std::once_flag stopped_;
};

/// Binds a TCP listening socket. Throws BindError.
int bind_listener(const std::string& host, std::uint16_t port, std::uint16_t& bound_port);

}  // namespace qw::server
