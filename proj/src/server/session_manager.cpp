#include "quizwright/server/session_manager.hpp"

#include <chrono>
#include <cstdio>
#include <set>

#include "quizwright/digest.hpp"

namespace qw::server {

using protocol::ErrorCode;
using protocol::ProtocolError;
using protocol::SessionState;

namespace {

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::string join(const quiz::ChoiceSet& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ',';
    out += id;
  }
  return out;
}

}  // namespace

protocol::SessionSummary summarize(const Session& s) {
  protocol::SessionSummary out{s.session_id, s.student.name, s.student.subject, s.state,
                               static_cast<int>(s.answers.size()), std::nullopt};
  if (s.report) out.percent = s.report->percent.to_string();
  return out;
}

protocol::QuestionView question_view(const quiz::Question& q) {
  protocol::QuestionView v{q.id, std::string(quiz::to_string(q.kind)), q.points, q.text, {}};
  for (const auto& c : q.choices) v.choices.push_back({c.id, c.text});
  return v;
}

SessionManager::SessionManager(std::shared_ptr<const ServerData> data, std::uint64_t nonce)
    : data_(std::move(data)), nonce_(nonce) {}

std::uint64_t SessionManager::derive_seed(const std::string& session_id, std::uint64_t nonce) {
  auto d = digest::md5(session_id + ":" + std::to_string(nonce));
  std::uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | d.bytes()[static_cast<std::size_t>(i)];
  return seed;
}

Session& SessionManager::require(const std::string& session_id) {
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ProtocolError(ErrorCode::UnknownSession, "no session '" + session_id + "'");
  return it->second;
}

void SessionManager::publish(protocol::EventKind kind, const Session& s) {
  protocol::Event event{kind, s.session_id, s.student.name, s.student.subject, static_cast<int>(s.answers.size()),
                        std::nullopt};
  if (s.report) event.percent = s.report->percent.to_string();
  for (const auto& [id, listener] : listeners_) listener(event);
}

protocol::SessionCreated SessionManager::register_student(const Student& student) {
  if (student.name.empty()) throw ProtocolError(ErrorCode::Malformed, "student name must not be empty");
  std::lock_guard lock(mutex_);
  char id[16];
  std::snprintf(id, sizeof id, "S-%06llu", static_cast<unsigned long long>(next_session_));
  Session s;
  s.session_id = id;
  s.student = student;
  s.seed = derive_seed(s.session_id, nonce_);
  s.registered_at = now_seconds();
  ++next_session_;
  auto& stored = sessions_.emplace(s.session_id, std::move(s)).first->second;
  publish(protocol::EventKind::Registered, stored);
  return {stored.session_id, data_->config.id};
}

std::vector<quiz::Question> SessionManager::start(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  Session& s = require(session_id);
  if (s.state != SessionState::Registered) throw ProtocolError(ErrorCode::State, "session already started");
  s.presented = quiz::select_questions(data_->bank, data_->config, s.seed);
  s.state = SessionState::InProgress;
  s.started_at = now_seconds();
  publish(protocol::EventKind::Started, s);
  return s.presented;
}

int SessionManager::answer(const std::string& session_id, const std::string& question_id,
                           const std::vector<std::string>& selected) {
  std::lock_guard lock(mutex_);
  Session& s = require(session_id);
  if (s.state != SessionState::InProgress) throw ProtocolError(ErrorCode::State, "session is not in progress");
  const quiz::Question* q = nullptr;
  for (const auto& p : s.presented) {
    if (p.id == question_id) q = &p;
  }
  if (!q) throw ProtocolError(ErrorCode::UnknownQuestion, "question '" + question_id + "' was not presented");

  quiz::ChoiceSet ids(selected.begin(), selected.end());
  if (ids.size() != selected.size()) throw ProtocolError(ErrorCode::Malformed, "selection repeats a choice");
  if (ids.empty()) throw ProtocolError(ErrorCode::Malformed, "selection must not be empty");
  if (q->kind == quiz::QuestionKind::Single && ids.size() != 1) {
    throw ProtocolError(ErrorCode::Malformed, "question '" + question_id + "' takes exactly one choice");
  }
  for (const auto& id : ids) {
    if (!q->has_choice(id)) throw ProtocolError(ErrorCode::Malformed, "question '" + question_id + "' has no choice '" + id + "'");
  }
  s.answers[question_id] = std::move(ids);
  publish(protocol::EventKind::Answered, s);
  return static_cast<int>(s.answers.size());
}

quiz::ScoreReport SessionManager::finish(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  Session& s = require(session_id);
  if (s.state != SessionState::InProgress) throw ProtocolError(ErrorCode::State, "session is not in progress");
  quiz::ScoreReport report = quiz::grade(s.presented, s.answers);
  Session completed = s;
  completed.state = SessionState::Completed;
  completed.report = report;
  completed.finished_at = now_seconds();
  // Persist before committing so a write failure leaves the session open.
  write_file_atomically(data_->results_dir / (s.session_id + ".xml"),
                        xml::serialize(result_document(completed, data_->config.id)));
  s = std::move(completed);
  publish(protocol::EventKind::Finished, s);
  return report;
}

bool SessionManager::authenticate(std::string_view user_id, std::string_view password) const {
  return data_->users.authenticate(user_id, password);
}

std::vector<protocol::SessionSummary> SessionManager::snapshot_locked() const {
  std::vector<protocol::SessionSummary> out;
  out.reserve(sessions_.size());
  for (const auto& [id, s] : sessions_) out.push_back(summarize(s));
  return out;
}

std::vector<protocol::SessionSummary> SessionManager::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_locked();
}

SessionManager::SubscriptionId SessionManager::subscribe(
    Listener listener, const std::function<void(const std::vector<protocol::SessionSummary>&)>& on_subscribed) {
  std::lock_guard lock(mutex_);
  if (on_subscribed) on_subscribed(snapshot_locked());
  SubscriptionId id = next_listener_++;
  listeners_.emplace(id, std::move(listener));
  return id;
}

void SessionManager::unsubscribe(SubscriptionId id) {
  std::lock_guard lock(mutex_);
  listeners_.erase(id);
}

std::optional<Session> SessionManager::find(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

xml::XmlDocument SessionManager::result_document(const Session& s, const std::string& test_id) {
  xml::Element answers{"answers", {}, {}};
  for (const auto& q : s.presented) {
    auto it = s.answers.find(q.id);
    answers.children.emplace_back(
        xml::Element{"answer", {{"question", q.id}, {"selected", it == s.answers.end() ? "" : join(it->second)}}, {}});
  }
  xml::Element root{"result", {{"session", s.session_id}, {"test", test_id}}, {}};
  root.children.emplace_back(xml::Element{"student",
                                          {{"name", s.student.name},
                                           {"year", std::to_string(s.student.year_of_study)},
                                           {"subject", s.student.subject}},
                                          {}});
  root.children.emplace_back(std::move(answers));
  if (s.report) {
    root.children.emplace_back(xml::Element{"score",
                                            {{"points", std::to_string(s.report->points)},
                                             {"max", std::to_string(s.report->max_points)},
                                             {"percent", s.report->percent.to_string()}},
                                            {}});
  }
  return xml::XmlDocument{std::move(root)};
}

}  // namespace qw::server
