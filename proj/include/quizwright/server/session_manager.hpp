#pragma once

// Session lifecycle shared by every transport:
//   Registered --START--> InProgress --FINISH--> Completed
// All state lives behind one mutex; monitor listeners run under it, so a
// snapshot and the events that follow it never overlap or leave gaps.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "quizwright/protocol.hpp"
#include "quizwright/quizbank.hpp"
#include "quizwright/server/data_store.hpp"

namespace qw::server {

struct Student {
  std::string name;
  int year_of_study = 0;
  std::string subject;
};

struct Session {
  std::string session_id;
  Student student;
  protocol::SessionState state = protocol::SessionState::Registered;
  std::vector<quiz::Question> presented;
  quiz::AnswerMap answers;
  std::uint64_t seed = 0;
  std::optional<quiz::ScoreReport> report;
  std::int64_t registered_at = 0;
  std::int64_t started_at = 0;
  std::int64_t finished_at = 0;
};

class SessionManager {
 public:
  using Listener = std::function<void(const protocol::Event&)>;
  using SubscriptionId = std::uint64_t;

  SessionManager(std::shared_ptr<const ServerData> data, std::uint64_t nonce);

  // Every operation below throws protocol::ProtocolError on rejection and
  // leaves state untouched in that case.
  protocol::SessionCreated register_student(const Student& student);
  std::vector<quiz::Question> start(const std::string& session_id);
  /// Returns the number of distinct questions answered so far.
  int answer(const std::string& session_id, const std::string& question_id, const std::vector<std::string>& selected);
  quiz::ScoreReport finish(const std::string& session_id);

  bool authenticate(std::string_view user_id, std::string_view password) const;

  /// Ordered by session id.
  std::vector<protocol::SessionSummary> snapshot() const;

  /// Adds a listener. `on_subscribed` runs first, under the same lock, with
  /// the snapshot the listener's events continue from. Listeners must not
  /// block or call back into the manager.
  SubscriptionId subscribe(Listener listener,
                           const std::function<void(const std::vector<protocol::SessionSummary>&)>& on_subscribed = {});
  void unsubscribe(SubscriptionId id);

  /// Copy of one session, for inspection.
  std::optional<Session> find(const std::string& session_id) const;

  const ServerData& data() const noexcept { return *data_; }
  std::uint64_t nonce() const noexcept { return nonce_; }

  /// First 8 bytes (little-endian) of md5(session_id + ":" + nonce).
  static std::uint64_t derive_seed(const std::string& session_id, std::uint64_t nonce);

  /// Result document written for a completed session.
  static xml::XmlDocument result_document(const Session& session, const std::string& test_id);

 private:
  Session& require(const std::string& session_id);
  std::vector<protocol::SessionSummary> snapshot_locked() const;
  void publish(protocol::EventKind kind, const Session& s);

  std::shared_ptr<const ServerData> data_;
  std::uint64_t nonce_;

  mutable std::mutex mutex_;
  std::map<std::string, Session> sessions_;
  std::uint64_t next_session_ = 1;
  std::map<SubscriptionId, Listener> listeners_;
  SubscriptionId next_listener_ = 1;
};

protocol::SessionSummary summarize(const Session& session);
protocol::QuestionView question_view(const quiz::Question& question);

}  // namespace qw::server
