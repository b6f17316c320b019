#pragma once

// Newline-delimited JSON messages exchanged between the server and its
// student, admin and monitor clients. Every message is one JSON object with
// a "type" field, written on one line.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qw::protocol {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = 65536;  // excluding the '\n'

enum class ErrorCode { Auth, State, UnknownSession, UnknownQuestion, Malformed, Version };

/// "E_AUTH", "E_STATE", ...
std::string_view to_string(ErrorCode code);

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Role { Student, Admin, Monitor };
enum class EventKind { Registered, Started, Answered, Finished };
enum class SessionState { Registered, InProgress, Completed };

std::string_view to_string(Role role);
std::string_view to_string(EventKind kind);
std::string_view to_string(SessionState state);

struct ChoiceView {
  std::string id;
  std::string text;
  bool operator==(const ChoiceView&) const = default;
};

/// A question as shown to a student. Carries no answer key.
struct QuestionView {
  std::string id;
  std::string type;  // "single" | "multi"
  int points = 1;
  std::string text;
  std::vector<ChoiceView> choices;
  bool operator==(const QuestionView&) const = default;
};

struct SessionSummary {
  std::string session_id;
  std::string name;
  std::string subject;
  SessionState state = SessionState::Registered;
  int answered_count = 0;
  std::optional<std::string> percent;  // present once Completed
  bool operator==(const SessionSummary&) const = default;
};

// Client -> server
struct Hello {
  Role role = Role::Student;
  int protocol_version = kProtocolVersion;
  bool operator==(const Hello&) const = default;
};
struct Auth {
  std::string user_id;
  std::string password;
  bool operator==(const Auth&) const = default;
};
struct Register {
  std::string name;
  int year_of_study = 0;
  std::string subject;
  bool operator==(const Register&) const = default;
};
struct Start {
  std::string session_id;
  bool operator==(const Start&) const = default;
};
struct Answer {
  std::string session_id;
  std::string question_id;
  std::vector<std::string> selected;
  bool operator==(const Answer&) const = default;
};
struct Finish {
  std::string session_id;
  bool operator==(const Finish&) const = default;
};
struct ListSessions {
  bool operator==(const ListSessions&) const = default;
};

// Server -> client
struct Welcome {
  std::string server_version;
  bool operator==(const Welcome&) const = default;
};
struct Ack {
  bool operator==(const Ack&) const = default;
};
struct SessionCreated {
  std::string session_id;
  std::string test_id;
  bool operator==(const SessionCreated&) const = default;
};
struct TestPaper {
  std::string test_id;
  std::vector<QuestionView> questions;
  bool operator==(const TestPaper&) const = default;
};
struct Result {
  int points = 0;
  int max_points = 0;
  std::string percent;
  bool operator==(const Result&) const = default;
};
struct Sessions {
  std::vector<SessionSummary> sessions;
  bool operator==(const Sessions&) const = default;
};
struct Event {
  EventKind kind = EventKind::Registered;
  std::string session_id;
  std::string name;
  std::string subject;
  int answered_count = 0;
  std::optional<std::string> percent;
  bool operator==(const Event&) const = default;
};
struct Error {
  ErrorCode code = ErrorCode::Malformed;
  std::string message;
  bool operator==(const Error&) const = default;
};

using Message = std::variant<Hello, Welcome, Auth, Ack, Register, SessionCreated, Start, TestPaper, Answer, Finish,
                             Result, ListSessions, Sessions, Event, Error>;

/// Wire tag of a message: "HELLO", "SESSION", "TEST", ...
std::string_view type_name(const Message& msg);

/// One line including the trailing '\n'. Throws ProtocolError(Malformed) if
/// the frame would exceed kMaxFrameBytes.
std::string encode(const Message& msg);

/// Parses one frame (without the terminator). Unknown fields are ignored.
/// Throws ProtocolError: Malformed for bad input, Version for a HELLO with an
/// unsupported protocol_version.
Message decode(std::string_view line);

}  // namespace qw::protocol
