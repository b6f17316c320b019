#include "quizwright/server/connection.hpp"

namespace qw::server {

using namespace protocol;

ConnectionHandler::ConnectionHandler(SessionManager& manager, Send send) : manager_(manager), send_(std::move(send)) {}

ConnectionHandler::~ConnectionHandler() {
  if (subscription_) manager_.unsubscribe(*subscription_);
}

void ConnectionHandler::reply_error(ErrorCode code, const std::string& message) { send_(Error{code, message}); }

bool ConnectionHandler::handle_line(std::string_view line) {
  Message msg;
  try {
    msg = decode(line);
  } catch (const ProtocolError& e) {
    reply_error(e.code(), e.what());
    return e.code() != ErrorCode::Version;
  }
  return handle(msg);
}

bool ConnectionHandler::handle(const Message& msg) {
  if (const auto* hello = std::get_if<Hello>(&msg)) {
    if (role_) {
      reply_error(ErrorCode::State, "HELLO already received");
      return true;
    }
    if (hello->protocol_version != kProtocolVersion) {
      reply_error(ErrorCode::Version, "unsupported protocol_version " + std::to_string(hello->protocol_version));
      return false;
    }
    role_ = hello->role;
    send_(Welcome{std::string(kServerVersion)});
    return true;
  }
  if (!role_) {
    reply_error(ErrorCode::State, "expected HELLO first");
    return true;
  }
  try {
    dispatch(msg);
  } catch (const ProtocolError& e) {
    reply_error(e.code(), e.what());
  } catch (const std::exception& e) {
    // Grading or persistence failure; the session is left unchanged.
    reply_error(ErrorCode::State, e.what());
  }
  return true;
}

void ConnectionHandler::dispatch(const Message& msg) {
  if (const auto* auth = std::get_if<Auth>(&msg)) {
    if (*role_ == Role::Student) throw ProtocolError(ErrorCode::Auth, "students do not authenticate");
    if (authenticated_) throw ProtocolError(ErrorCode::State, "already authenticated");
    if (!manager_.authenticate(auth->user_id, auth->password)) {
      throw ProtocolError(ErrorCode::Auth, "invalid user id or password");
    }
    authenticated_ = true;
    if (*role_ == Role::Monitor) {
      // ACK goes out under the manager lock, ahead of any event.
      subscription_ = manager_.subscribe([send = send_](const Event& e) { send(e); },
                                         [this](const std::vector<SessionSummary>&) { send_(Ack{}); });
    } else {
      send_(Ack{});
    }
    return;
  }
  if (std::holds_alternative<ListSessions>(msg)) {
    if (*role_ == Role::Student || !authenticated_) throw ProtocolError(ErrorCode::Auth, "LIST_SESSIONS requires AUTH");
    send_(Sessions{manager_.snapshot()});
    return;
  }
  const bool student_message = std::holds_alternative<Register>(msg) || std::holds_alternative<Start>(msg) ||
                               std::holds_alternative<Answer>(msg) || std::holds_alternative<Finish>(msg);
  if (student_message) {
    if (*role_ != Role::Student) throw ProtocolError(ErrorCode::State, std::string(type_name(msg)) + " is for students");
    send_(handle_student(manager_, msg));
    return;
  }
  throw ProtocolError(ErrorCode::Malformed, std::string(type_name(msg)) + " is not a client message");
}

Message handle_student(SessionManager& manager, const Message& msg) {
  if (const auto* reg = std::get_if<Register>(&msg)) {
    return manager.register_student({reg->name, reg->year_of_study, reg->subject});
  }
  if (const auto* start = std::get_if<Start>(&msg)) {
    TestPaper paper{manager.data().config.id, {}};
    for (const auto& q : manager.start(start->session_id)) paper.questions.push_back(question_view(q));
    return paper;
  }
  if (const auto* answer = std::get_if<Answer>(&msg)) {
    manager.answer(answer->session_id, answer->question_id, answer->selected);
    return Ack{};
  }
  if (const auto* finish = std::get_if<Finish>(&msg)) {
    auto report = manager.finish(finish->session_id);
    return Result{report.points, report.max_points, report.percent.to_string()};
  }
  throw ProtocolError(ErrorCode::Malformed, std::string(type_name(msg)) + " is not a student message");
}

}  // namespace qw::server
