#include <limits>

#include "json.hpp"
#include "quizwright/protocol.hpp"

namespace qw::protocol {

using Json = nlohmann::ordered_json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Auth: return "E_AUTH";
    case ErrorCode::State: return "E_STATE";
    case ErrorCode::UnknownSession: return "E_UNKNOWN_SESSION";
    case ErrorCode::UnknownQuestion: return "E_UNKNOWN_QUESTION";
    case ErrorCode::Malformed: return "E_MALFORMED";
    case ErrorCode::Version: return "E_VERSION";
  }
  return "E_MALFORMED";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Student: return "student";
    case Role::Admin: return "admin";
    case Role::Monitor: return "monitor";
  }
  return "student";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Registered: return "registered";
    case EventKind::Started: return "started";
    case EventKind::Answered: return "answered";
    case EventKind::Finished: return "finished";
  }
  return "registered";
}

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::Registered: return "registered";
    case SessionState::InProgress: return "in_progress";
    case SessionState::Completed: return "completed";
  }
  return "registered";
}

namespace {

[[noreturn]] void malformed(const std::string& why) { throw ProtocolError(ErrorCode::Malformed, why); }

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& text, const Enum (&values)[N], std::string_view field) {
  for (Enum v : values) {
    if (to_string(v) == text) return v;
  }
  malformed("invalid value '" + text + "' for field '" + std::string(field) + "'");
}

constexpr Role kRoles[] = {Role::Student, Role::Admin, Role::Monitor};
constexpr EventKind kEventKinds[] = {EventKind::Registered, EventKind::Started, EventKind::Answered,
                                     EventKind::Finished};
constexpr SessionState kStates[] = {SessionState::Registered, SessionState::InProgress, SessionState::Completed};
constexpr ErrorCode kCodes[] = {ErrorCode::Auth,    ErrorCode::State,     ErrorCode::UnknownSession,
                                ErrorCode::UnknownQuestion, ErrorCode::Malformed, ErrorCode::Version};

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

int integer(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) malformed(std::string("field '") + key + "' out of range");
    return static_cast<int>(u);
  }
  auto i = v.get<std::int64_t>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    malformed(std::string("field '") + key + "' out of range");
  }
  return static_cast<int>(i);
}

const Json& array(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) malformed(std::string("field '") + key + "' must be an array");
  return v;
}

std::optional<std::string> optional_str(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) malformed(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

const Json& object(const Json& v, const char* what) {
  if (!v.is_object()) malformed(std::string(what) + " must be an object");
  return v;
}

Json summary_json(const SessionSummary& s) {
  Json j = {{"session_id", s.session_id},
            {"name", s.name},
            {"subject", s.subject},
            {"state", to_string(s.state)},
            {"answered_count", s.answered_count}};
  if (s.percent) j["percent"] = *s.percent;
  return j;
}

struct Encoder {
  Json& j;

  void operator()(const Hello& m) const {
    j["role"] = to_string(m.role);
    j["protocol_version"] = m.protocol_version;
  }
  void operator()(const Welcome& m) const { j["server_version"] = m.server_version; }
  void operator()(const Auth& m) const {
    j["user_id"] = m.user_id;
    j["password"] = m.password;
  }
  void operator()(const Ack&) const {}
  void operator()(const Register& m) const {
    j["name"] = m.name;
    j["year_of_study"] = m.year_of_study;
    j["subject"] = m.subject;
  }
  void operator()(const SessionCreated& m) const {
    j["session_id"] = m.session_id;
    j["test_id"] = m.test_id;
  }
  void operator()(const Start& m) const { j["session_id"] = m.session_id; }
  void operator()(const TestPaper& m) const {
    j["test_id"] = m.test_id;
    Json qs = Json::array();
    for (const auto& q : m.questions) {
      Json choices = Json::array();
      for (const auto& c : q.choices) choices.push_back({{"id", c.id}, {"text", c.text}});
      qs.push_back({{"id", q.id}, {"type", q.type}, {"points", q.points}, {"text", q.text}, {"choices", choices}});
    }
    j["questions"] = std::move(qs);
  }
  void operator()(const Answer& m) const {
    j["session_id"] = m.session_id;
    j["question_id"] = m.question_id;
    j["selected"] = m.selected;
  }
  void operator()(const Finish& m) const { j["session_id"] = m.session_id; }
  void operator()(const Result& m) const {
    j["points"] = m.points;
    j["max_points"] = m.max_points;
    j["percent"] = m.percent;
  }
  void operator()(const ListSessions&) const {}
  void operator()(const Sessions& m) const {
    Json list = Json::array();
    for (const auto& s : m.sessions) list.push_back(summary_json(s));
    j["sessions"] = std::move(list);
  }
  void operator()(const Event& m) const {
    j["kind"] = to_string(m.kind);
    j["session_id"] = m.session_id;
    j["name"] = m.name;
    j["subject"] = m.subject;
    j["answered_count"] = m.answered_count;
    if (m.percent) j["percent"] = *m.percent;
  }
  void operator()(const Error& m) const {
    j["code"] = to_string(m.code);
    j["message"] = m.message;
  }
};

struct TypeName {
  std::string_view operator()(const Hello&) const { return "HELLO"; }
  std::string_view operator()(const Welcome&) const { return "WELCOME"; }
  std::string_view operator()(const Auth&) const { return "AUTH"; }
  std::string_view operator()(const Ack&) const { return "ACK"; }
  std::string_view operator()(const Register&) const { return "REGISTER"; }
  std::string_view operator()(const SessionCreated&) const { return "SESSION"; }
  std::string_view operator()(const Start&) const { return "START"; }
  std::string_view operator()(const TestPaper&) const { return "TEST"; }
  std::string_view operator()(const Answer&) const { return "ANSWER"; }
  std::string_view operator()(const Finish&) const { return "FINISH"; }
  std::string_view operator()(const Result&) const { return "RESULT"; }
  std::string_view operator()(const ListSessions&) const { return "LIST_SESSIONS"; }
  std::string_view operator()(const Sessions&) const { return "SESSIONS"; }
  std::string_view operator()(const Event&) const { return "EVENT"; }
  std::string_view operator()(const Error&) const { return "ERROR"; }
};

Message decode_object(const Json& j) {
  const std::string type = str(j, "type");
  if (type == "HELLO") {
    Hello m;
    m.role = parse_enum(str(j, "role"), kRoles, "role");
    m.protocol_version = integer(j, "protocol_version");
    if (m.protocol_version != kProtocolVersion) {
      throw ProtocolError(ErrorCode::Version,
                          "unsupported protocol_version " + std::to_string(m.protocol_version) + ", server speaks " +
                              std::to_string(kProtocolVersion));
    }
    return m;
  }
  if (type == "WELCOME") return Welcome{str(j, "server_version")};
  if (type == "AUTH") return Auth{str(j, "user_id"), str(j, "password")};
  if (type == "ACK") return Ack{};
  if (type == "REGISTER") return Register{str(j, "name"), integer(j, "year_of_study"), str(j, "subject")};
  if (type == "SESSION") return SessionCreated{str(j, "session_id"), str(j, "test_id")};
  if (type == "START") return Start{str(j, "session_id")};
  if (type == "TEST") {
    TestPaper m{str(j, "test_id"), {}};
    for (const Json& qj : array(j, "questions")) {
      object(qj, "question");
      QuestionView q{str(qj, "id"), str(qj, "type"), integer(qj, "points"), str(qj, "text"), {}};
      for (const Json& cj : array(qj, "choices")) {
        object(cj, "choice");
        q.choices.push_back({str(cj, "id"), str(cj, "text")});
      }
      m.questions.push_back(std::move(q));
    }
    return m;
  }
  if (type == "ANSWER") {
    Answer m{str(j, "session_id"), str(j, "question_id"), {}};
    for (const Json& s : array(j, "selected")) {
      if (!s.is_string()) malformed("selected entries must be strings");
      m.selected.push_back(s.get<std::string>());
    }
    return m;
  }
  if (type == "FINISH") return Finish{str(j, "session_id")};
  if (type == "RESULT") return Result{integer(j, "points"), integer(j, "max_points"), str(j, "percent")};
  if (type == "LIST_SESSIONS") return ListSessions{};
  if (type == "SESSIONS") {
    Sessions m;
    for (const Json& sj : array(j, "sessions")) {
      object(sj, "session summary");
      m.sessions.push_back({str(sj, "session_id"), str(sj, "name"), str(sj, "subject"),
                            parse_enum(str(sj, "state"), kStates, "state"), integer(sj, "answered_count"),
                            optional_str(sj, "percent")});
    }
    return m;
  }
  if (type == "EVENT") {
    return Event{parse_enum(str(j, "kind"), kEventKinds, "kind"), str(j, "session_id"), str(j, "name"),
                 str(j, "subject"), integer(j, "answered_count"), optional_str(j, "percent")};
  }
  if (type == "ERROR") return Error{parse_enum(str(j, "code"), kCodes, "code"), str(j, "message")};
  malformed("unknown message type '" + type + "'");
}

}  // namespace

std::string_view type_name(const Message& msg) { return std::visit(TypeName{}, msg); }

std::string encode(const Message& msg) {
  Json j = {{"type", type_name(msg)}};
  std::visit(Encoder{j}, msg);
  std::string line = j.dump(-1, ' ', false, Json::error_handler_t::replace);
  if (line.size() > kMaxFrameBytes) {
    malformed("encoded message is " + std::to_string(line.size()) + " bytes, limit is " +
              std::to_string(kMaxFrameBytes));
  }
  line += '\n';
  return line;
}

Message decode(std::string_view line) {
  if (line.size() > kMaxFrameBytes) malformed("frame exceeds " + std::to_string(kMaxFrameBytes) + " bytes");
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded()) malformed("frame is not valid JSON");
  object(j, "frame");
  return decode_object(j);
}

}  // namespace qw::protocol
