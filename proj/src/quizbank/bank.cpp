#include <charconv>
#include <set>

#include "quizwright/quizbank.hpp"

namespace qw::quiz {

std::string_view to_string(QuestionKind kind) {
  return kind == QuestionKind::Single ? "single" : "multi";
}

bool Question::has_choice(std::string_view choice_id) const {
  for (const auto& c : choices) {
    if (c.id == choice_id) return true;
  }
  return false;
}

const Question* QuizBank::find(std::string_view question_id) const {
  for (const auto& q : questions) {
    if (q.id == question_id) return &q;
  }
  return nullptr;
}

namespace {

template <typename Int>
Int to_int(const std::string& text, std::string_view what) {
  Int value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw QuizError(std::string(what) + " '" + text + "' is out of range");
  }
  return value;
}

std::string format_violations(std::string_view what, const std::vector<schema::Violation>& violations) {
  std::string message = std::string(what) + " failed validation:";
  for (const auto& v : violations) {
    message += "\n  " + v.path + ": " + std::string(schema::to_string(v.rule)) + ": " + v.message;
  }
  return message;
}

}  // namespace

QuizBank bank_from_document(const xml::XmlDocument& doc) {
  auto violations = schema::validate(doc, schema::builtin("quizbank"));
  if (!violations.empty()) throw QuizError(format_violations("quiz bank", violations), std::move(violations));

  QuizBank bank;
  bank.subject = *doc.root.attribute("subject");
  bank.version = to_int<long>(*doc.root.attribute("version"), "bank version");
  std::set<std::string> ids;
  for (const xml::Element* qe : doc.root.child_elements("question")) {
    Question q;
    q.id = *qe->attribute("id");
    if (!ids.insert(q.id).second) throw QuizError("duplicate question id '" + q.id + "'");
    q.kind = *qe->attribute("type") == "multi" ? QuestionKind::Multi : QuestionKind::Single;
    q.points = to_int<int>(*qe->attribute("points"), "points of question '" + q.id + "'");
    if (q.points < 1) throw QuizError("question '" + q.id + "' must be worth at least 1 point");
    q.text = qe->child_elements("text").front()->text();
    for (const xml::Element* ce : qe->child_elements("choice")) {
      Choice c{*ce->attribute("id"), ce->text()};
      if (q.has_choice(c.id)) throw QuizError("question '" + q.id + "' has duplicate choice id '" + c.id + "'");
      q.choices.push_back(std::move(c));
    }
    q.key_digest = *qe->child_elements("answer").front()->attribute("digest");
    bank.questions.push_back(std::move(q));
  }
  return bank;
}

QuizBank load_bank(std::string_view input) {
  return bank_from_document(xml::parse_tree(input));
}

TestConfig load_test_config(std::string_view input) {
  auto doc = xml::parse_tree(input);
  auto violations = schema::validate(doc, schema::builtin("testconfig"));
  if (!violations.empty()) throw QuizError(format_violations("test config", violations), std::move(violations));
  TestConfig config;
  config.id = *doc.root.attribute("id");
  config.bank_path = *doc.root.attribute("bank");
  long count = to_int<long>(*doc.root.attribute("questions"), "question count");
  if (count < 1) throw QuizError("test config must present at least one question");
  config.question_count = static_cast<std::size_t>(count);
  config.shuffle = *doc.root.attribute("shuffle") == "true";
  return config;
}

}  // namespace qw::quiz
