#include "quizwright/server/http_gateway.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <cerrno>
#include <map>

#include "json.hpp"
#include "quizwright/server/connection.hpp"
#include "quizwright/server/outbox.hpp"

namespace qw::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

int http_status(protocol::ErrorCode code) {
  switch (code) {
    case protocol::ErrorCode::Auth: return 401;
    case protocol::ErrorCode::UnknownSession:
    case protocol::ErrorCode::UnknownQuestion: return 404;
    case protocol::ErrorCode::State: return 409;
    case protocol::ErrorCode::Malformed:
    case protocol::ErrorCode::Version: return 400;
  }
  return 500;
}

std::optional<std::pair<std::string, std::string>> parse_credentials(std::string_view header) {
  auto colon = header.find(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  return std::pair{std::string(header.substr(0, colon)), std::string(header.substr(colon + 1))};
}

std::optional<std::string> percent_decode(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '+') {
      out += ' ';
    } else if (c == '%') {
      if (i + 2 >= text.size()) return std::nullopt;
      auto hex = [](char h) -> int {
        if (h >= '0' && h <= '9') return h - '0';
        if (h >= 'a' && h <= 'f') return h - 'a' + 10;
        if (h >= 'A' && h <= 'F') return h - 'A' + 10;
        return -1;
      };
      int hi = hex(text[i + 1]), lo = hex(text[i + 2]);
      if (hi < 0 || lo < 0) return std::nullopt;
      out += static_cast<char>(hi * 16 + lo);
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

std::optional<std::filesystem::path> static_file_path(const std::filesystem::path& root, std::string_view target) {
  auto path = percent_decode(target.substr(0, target.find('?')));
  if (!path || path->empty() || path->front() != '/' || path->find('\0') != std::string::npos) return std::nullopt;
  std::filesystem::path rel = std::filesystem::path(path->substr(1)).lexically_normal();
  for (const auto& part : rel) {
    if (part == "..") return std::nullopt;
  }
  if (rel.empty() || rel.filename().empty()) rel /= "index.html";
  return root / rel;
}

namespace {

std::string_view std_view(beast::string_view s) { return {s.data(), s.size()}; }
beast::string_view beast_view(std::string_view s) { return {s.data(), s.size()}; }

std::string_view mime_type(const std::filesystem::path& p) {
  static const std::map<std::string, std::string_view> types{
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"},  {".mjs", "text/javascript"},
      {".css", "text/css"},                  {".json", "application/json"}, {".svg", "image/svg+xml"},
      {".png", "image/png"},                 {".ico", "image/x-icon"},      {".map", "application/json"},
      {".woff2", "font/woff2"},              {".txt", "text/plain; charset=utf-8"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

std::string json_body(const protocol::Message& m) {
  std::string line = protocol::encode(m);
  line.pop_back();
  return line;
}

Response make_response(const Request& req, http::status status, std::string body, std::string_view type) {
  Response res{status, req.version()};
  res.set(http::field::server, beast_view(kServerVersion));
  res.set(http::field::content_type, beast_view(type));
  res.set(http::field::cache_control, "no-store");
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response message_response(const Request& req, const protocol::Message& m) {
  http::status status = http::status::ok;
  if (const auto* e = std::get_if<protocol::Error>(&m)) status = static_cast<http::status>(http_status(e->code));
  return make_response(req, status, json_body(m), "application/json");
}

Response error_response(const Request& req, protocol::ErrorCode code, std::string message) {
  return message_response(req, protocol::Error{code, std::move(message)});
}

std::string_view path_of(std::string_view target) { return target.substr(0, target.find('?')); }

std::optional<std::string> query_param(std::string_view target, std::string_view key) {
  auto q = target.find('?');
  if (q == std::string_view::npos) return std::nullopt;
  const std::string_view query = target.substr(q + 1);
  for (std::size_t pos = 0; pos < query.size();) {
    std::size_t end = std::min(query.find('&', pos), query.size());
    std::string_view pair = query.substr(pos, end - pos);
    auto eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == key) return percent_decode(pair.substr(eq + 1));
    pos = end + 1;
  }
  return std::nullopt;
}

bool authorized(SessionManager& manager, const Request& req, bool allow_query) {
  std::optional<std::string> header;
  if (auto it = req.find(http::field::authorization); it != req.end()) {
    header = std::string(it->value());
  } else if (allow_query) {
    // Browsers cannot set headers on a WebSocket handshake.
    header = query_param(std_view(req.target()), "auth");
  }
  if (!header) return false;
  auto creds = parse_credentials(*header);
  return creds && manager.authenticate(creds->first, creds->second);
}

const std::map<std::string_view, std::string_view>& student_routes() {
  static const std::map<std::string_view, std::string_view> routes{
      {"/api/register", "REGISTER"}, {"/api/start", "START"}, {"/api/answer", "ANSWER"}, {"/api/finish", "FINISH"}};
  return routes;
}

Response handle_api(SessionManager& manager, const Request& req, std::string_view path) {
  if (auto route = student_routes().find(path); route != student_routes().end()) {
    if (req.method() != http::verb::post) return error_response(req, protocol::ErrorCode::Malformed, "use POST");
    auto body = nlohmann::json::parse(req.body(), nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      return error_response(req, protocol::ErrorCode::Malformed, "body must be a JSON object");
    }
    body["type"] = route->second;
    try {
      return message_response(req, handle_student(manager, protocol::decode(body.dump())));
    } catch (const protocol::ProtocolError& e) {
      return error_response(req, e.code(), e.what());
    } catch (const std::exception& e) {
      return make_response(req, http::status::internal_server_error,
                           json_body(protocol::Error{protocol::ErrorCode::State, e.what()}), "application/json");
    }
  }
  if (path == "/api/sessions") {
    if (req.method() != http::verb::get) return error_response(req, protocol::ErrorCode::Malformed, "use GET");
    if (!authorized(manager, req, false)) return error_response(req, protocol::ErrorCode::Auth, "invalid credentials");
    return message_response(req, protocol::Sessions{manager.snapshot()});
  }
  return make_response(req, http::status::not_found,
                       json_body(protocol::Error{protocol::ErrorCode::Malformed, "no such endpoint"}),
                       "application/json");
}

Response handle_static(const std::filesystem::path& root, const Request& req) {
  if (req.method() != http::verb::get && req.method() != http::verb::head) {
    return make_response(req, http::status::method_not_allowed, "method not allowed\n", "text/plain");
  }
  auto file = static_file_path(root, std_view(req.target()));
  std::error_code ec;
  if (file && std::filesystem::is_directory(*file, ec)) *file /= "index.html";
  if (!file || !std::filesystem::is_regular_file(*file, ec)) {
    return make_response(req, http::status::not_found, "not found\n", "text/plain");
  }
  std::string content;
  try {
    content = read_text_file(*file);
  } catch (const std::exception&) {
    return make_response(req, http::status::not_found, "not found\n", "text/plain");
  }
  auto res = make_response(req, http::status::ok, std::move(content), mime_type(*file));
  if (req.method() == http::verb::head) {
    auto length = res.body().size();
    res.body().clear();
    res.content_length(length);
  }
  return res;
}

class Subscription {
 public:
  Subscription(SessionManager& manager, SessionManager::SubscriptionId id) : manager_(manager), id_(id) {}
  ~Subscription() { manager_.unsubscribe(id_); }
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;

 private:
  SessionManager& manager_;
  SessionManager::SubscriptionId id_;
};

void serve_monitor(SessionManager& manager, const ConnectionSet& connections, tcp::socket& sock, Request req) {
  if (!authorized(manager, req, true)) {
    beast::error_code ec;
    http::write(sock, error_response(req, protocol::ErrorCode::Auth, "invalid credentials"), ec);
    return;
  }
  websocket::stream<tcp::socket&> ws(sock);
  beast::error_code ec;
  ws.accept(req, ec);
  if (ec) return;
  ws.text(true);

  Outbox outbox;
  Subscription sub(manager, manager.subscribe([&outbox](const protocol::Event& e) { outbox.push(json_body(e)); },
                                              [&outbox](const std::vector<protocol::SessionSummary>& snapshot) {
                                                outbox.push(json_body(protocol::Sessions{snapshot}));
                                              }));
  const int fd = sock.native_handle();
  while (!connections.stopping()) {
    if (auto frame = outbox.pop_for(std::chrono::milliseconds(100))) {
      ws.write(asio::buffer(*frame), ec);
      if (ec) return;
      continue;
    }
    pollfd p{fd, POLLIN, 0};
    if (::poll(&p, 1, 0) > 0) {
      // Client frames carry nothing we act on; reading surfaces a close.
      beast::flat_buffer discard;
      ws.read(discard, ec);
      if (ec) return;
    }
  }
  ws.close(websocket::close_code::going_away, ec);
}

}  // namespace

HttpGateway::HttpGateway(SessionManager& manager, std::uint16_t port, std::filesystem::path web_root,
                         const std::string& host)
    : manager_(manager), web_root_(std::move(web_root)) {
  listen_fd_ = bind_listener(host, port, port_);
  acceptor_ = std::thread([this] { accept_loop(); });
}

HttpGateway::~HttpGateway() { stop(); }

void HttpGateway::stop() {
  std::call_once(stopped_, [this] {
    ::shutdown(listen_fd_, SHUT_RDWR);
    if (acceptor_.joinable()) acceptor_.join();
    ::close(listen_fd_);
    connections_.stop();
  });
}

void HttpGateway::accept_loop() {
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

void HttpGateway::serve(int fd) {
  {
    asio::io_context ioc;
    tcp::socket sock(ioc);
    beast::error_code ec;
    sock.assign(tcp::v4(), fd, ec);
    beast::flat_buffer buffer;
    while (!ec) {
      http::request_parser<http::string_body> parser;
      parser.body_limit(1 << 20);
      http::read(sock, buffer, parser, ec);
      if (ec) break;
      Request req = parser.release();
      std::string_view path = path_of(std_view(req.target()));
      if (websocket::is_upgrade(req)) {
        if (path == "/api/monitor") {
          try {
            serve_monitor(manager_, connections_, sock, std::move(req));
          } catch (const std::exception&) {
          }
        } else {
          http::write(sock, make_response(req, http::status::not_found, "not found\n", "text/plain"), ec);
        }
        break;
      }
      Response res = path.rfind("/api/", 0) == 0 ? handle_api(manager_, req, path) : handle_static(web_root_, req);
      http::write(sock, res, ec);
      if (!res.keep_alive()) break;
    }
    sock.shutdown(tcp::socket::shutdown_both, ec);
    // Deregister while the socket still owns the fd so the number cannot be
    // reused by a new connection in between.
    connections_.remove(fd);
  }
}

}  // namespace qw::server
