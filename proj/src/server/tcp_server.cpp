#include "quizwright/server/tcp_server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "quizwright/server/connection.hpp"
#include "quizwright/server/outbox.hpp"

namespace qw::server {

bool ConnectionSet::add(int fd) {
  std::lock_guard lock(mutex_);
  if (stopping_) return false;
  fds_.insert(fd);
  return true;
}

void ConnectionSet::remove(int fd) {
  // Notified under the lock: stop() may return and destroy this set as soon
  // as the lock is released.
  std::lock_guard lock(mutex_);
  fds_.erase(fd);
  idle_.notify_all();
}

void ConnectionSet::stop() {
  std::unique_lock lock(mutex_);
  stopping_ = true;
  for (int fd : fds_) ::shutdown(fd, SHUT_RDWR);
  idle_.wait(lock, [&] { return fds_.empty(); });
}

int bind_listener(const std::string& host, std::uint16_t port, std::uint16_t& bound_port) {
  int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw BindError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw BindError("invalid listen address " + host);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 128) < 0) {
    std::string why = std::strerror(errno);
    ::close(fd);
    throw BindError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  bound_port = ntohs(addr.sin_port);
  return fd;
}

TcpServer::TcpServer(SessionManager& manager, std::uint16_t port, const std::string& host) : manager_(manager) {
  listen_fd_ = bind_listener(host, port, port_);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::stop() {
  std::call_once(stopped_, [this] {
    ::shutdown(listen_fd_, SHUT_RDWR);
    if (acceptor_.joinable()) acceptor_.join();
    ::close(listen_fd_);
    connections_.stop();
  });
}

void TcpServer::accept_loop() {
  for (;;) {
    int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      return;
    }
    if (!connections_.add(fd)) {
      ::close(fd);
      return;
    }
    std::thread([this, fd] { serve(fd); }).detach();
  }
}

namespace {

bool send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

void TcpServer::serve(int fd) {
  Outbox outbox;
  std::thread writer([&] {
    bool ok = true;
    while (auto frame = outbox.pop()) {
      if (ok) ok = send_all(fd, *frame);
    }
  });
  {
    ConnectionHandler handler(manager_, [&outbox](const protocol::Message& m) {
      try {
        outbox.push(protocol::encode(m));
      } catch (const protocol::ProtocolError& e) {
        outbox.push(protocol::encode(protocol::Error{e.code(), e.what()}));
      }
    });
    std::string buffer;
    char chunk[8192];
    bool open = true;
    while (open) {
      ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (std::size_t nl; open && (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
        std::string_view line(buffer.data() + start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.size() > protocol::kMaxFrameBytes) {
          handler.handle_line(line);  // replies E_MALFORMED
          open = false;
        } else if (!line.empty()) {
          open = handler.handle_line(line);
        }
      }
      buffer.erase(0, start);
      if (open && buffer.size() > protocol::kMaxFrameBytes) {
        outbox.push(protocol::encode(protocol::Error{protocol::ErrorCode::Malformed, "frame exceeds 65536 bytes"}));
        open = false;
      }
    }
  }
  outbox.close();
  writer.join();
  ::shutdown(fd, SHUT_RDWR);
  connections_.remove(fd);
  ::close(fd);
}

}  // namespace qw::server
