#include "quizwright/quizbank.hpp"

namespace qw::quiz {

Percent Percent::of(std::int64_t points, std::int64_t max_points) {
  if (max_points <= 0) throw std::invalid_argument("max_points must be positive");
  // round-half-up of 10000 * points / max_points, in integers.
  return Percent((20000 * points + max_points) / (2 * max_points));
}

std::string Percent::to_string() const {
  std::string frac = std::to_string(hundredths_ % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(hundredths_ / 100) + "." + frac;
}

ScoreReport grade(std::span<const Question> questions, const AnswerMap& answers) {
  for (const auto& [question_id, selected] : answers) {
    bool presented = false;
    for (const auto& q : questions) presented = presented || q.id == question_id;
    if (!presented) throw QuizError("answer for question '" + question_id + "' which was not presented");
  }

  ScoreReport report;
  for (const auto& q : questions) {
    QuestionScore score;
    score.question_id = q.id;
    if (auto it = answers.find(q.id); it != answers.end() && !it->second.empty()) {
      score.selected = it->second;
      score.correct = digest::answer_digest(q.id, score.selected) == q.key_digest;
    }
    score.points_earned = score.correct ? q.points : 0;
    report.points += score.points_earned;
    report.max_points += q.points;
    report.per_question.push_back(std::move(score));
  }
  if (report.max_points > 0) report.percent = Percent::of(report.points, report.max_points);
  return report;
}

}  // namespace qw::quiz
