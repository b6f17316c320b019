#pragma once

// Quiz banks, test configuration, seeded question selection and grading.

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "quizwright/digest.hpp"
#include "quizwright/schema.hpp"
#include "quizwright/xml.hpp"

namespace qw::quiz {

using digest::ChoiceSet;

enum class QuestionKind { Single, Multi };

std::string_view to_string(QuestionKind kind);

struct Choice {
  std::string id;
  std::string text;
  bool operator==(const Choice&) const = default;
};

struct Question {
  std::string id;
  QuestionKind kind = QuestionKind::Single;
  int points = 1;
  std::string text;
  std::vector<Choice> choices;
  std::string key_digest;

  bool has_choice(std::string_view choice_id) const;
  bool operator==(const Question&) const = default;
};

struct QuizBank {
  std::string subject;
  long version = 1;
  std::vector<Question> questions;

  const Question* find(std::string_view question_id) const;
};

struct TestConfig {
  std::string id;
  std::string bank_path;
  std::size_t question_count = 1;
  bool shuffle = false;
};

/// Percentage held in hundredths so rendering never drifts.
class Percent {
 public:
  constexpr Percent() = default;
  static constexpr Percent from_hundredths(std::int64_t h) { return Percent(h); }

  /// round-half-up(100 * points / max_points, 2). max_points must be positive.
  static Percent of(std::int64_t points, std::int64_t max_points);

  constexpr std::int64_t hundredths() const noexcept { return hundredths_; }

  /// Always two fraction digits, e.g. "50.00".
  std::string to_string() const;

  auto operator<=>(const Percent&) const = default;

 private:
  constexpr explicit Percent(std::int64_t h) : hundredths_(h) {}
  std::int64_t hundredths_ = 0;
};

struct QuestionScore {
  std::string question_id;
  ChoiceSet selected;
  bool correct = false;
  int points_earned = 0;
};

struct ScoreReport {
  std::vector<QuestionScore> per_question;
  int points = 0;
  int max_points = 0;
  Percent percent;
};

/// Any problem turning a document into quiz data. Schema findings, when
/// that is the cause, are listed in violations().
class QuizError : public std::runtime_error {
 public:
  explicit QuizError(std::string message, std::vector<schema::Violation> violations = {})
      : std::runtime_error(std::move(message)), violations_(std::move(violations)) {}

  const std::vector<schema::Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<schema::Violation> violations_;
};

/// Parses, validates against the quizbank schema, and maps. Throws
/// xml::ParseError or QuizError.
QuizBank load_bank(std::string_view input);
QuizBank bank_from_document(const xml::XmlDocument& doc);

/// Parses and validates a <testconfig/> file. Does not check the bank size.
TestConfig load_test_config(std::string_view input);

/// Replaces every authoring `key="b,d"` attribute with the coded
/// `digest="..."` form. Throws QuizError naming the question on bad keys.
xml::XmlDocument hash_answers(const xml::XmlDocument& plaintext_bank);

/// SplitMix64 generator (Steele, Lea, Flood).
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// First question_count questions, optionally after a seeded Fisher-Yates
/// shuffle. Throws QuizError if the count exceeds the bank size.
std::vector<Question> select_questions(const QuizBank& bank, const TestConfig& config, std::uint64_t seed);

using AnswerMap = std::map<std::string, ChoiceSet, std::less<>>;

/// All-or-nothing grading against the coded keys. Unanswered questions
/// score zero. Throws QuizError for answers to questions not presented.
ScoreReport grade(std::span<const Question> questions, const AnswerMap& answers);

}  // namespace qw::quiz
