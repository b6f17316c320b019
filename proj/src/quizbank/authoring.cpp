#include <algorithm>

#include "quizwright/quizbank.hpp"

namespace qw::quiz {

namespace {

ChoiceSet parse_key(const std::string& key, const std::string& question_id) {
  ChoiceSet ids;
  std::size_t pos = 0;
  for (;;) {
    std::size_t comma = key.find(',', pos);
    std::string id = key.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (id.empty()) throw QuizError("question '" + question_id + "': empty choice id in key '" + key + "'");
    if (!ids.insert(id).second) {
      throw QuizError("question '" + question_id + "': choice '" + id + "' repeated in key");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return ids;
}

}  // namespace

xml::XmlDocument hash_answers(const xml::XmlDocument& plaintext_bank) {
  xml::XmlDocument doc = plaintext_bank;
  for (xml::Element* question : doc.root.child_elements("question")) {
    const std::string* qid = question->attribute("id");
    if (!qid) throw QuizError("question without an id");
    const std::string question_id = *qid;
    const std::string* type = question->attribute("type");
    const bool single = type && *type == "single";

    std::vector<std::string> choice_ids;
    for (const xml::Element* choice : question->child_elements("choice")) {
      if (const std::string* cid = choice->attribute("id")) choice_ids.push_back(*cid);
    }

    for (xml::Element* answer : question->child_elements("answer")) {
      const std::string* key = answer->attribute("key");
      if (!key) continue;
      ChoiceSet ids = parse_key(*key, question_id);
      for (const auto& id : ids) {
        if (std::find(choice_ids.begin(), choice_ids.end(), id) == choice_ids.end()) {
          throw QuizError("question '" + question_id + "': key names unknown choice '" + id + "'");
        }
      }
      if (single && ids.size() != 1) {
        throw QuizError("question '" + question_id + "': single-answer question needs exactly one key, got " +
                        std::to_string(ids.size()));
      }
      for (auto& attr : answer->attributes) {
        if (attr.name == "key") {
          attr.name = "digest";
          attr.value = digest::answer_digest(question_id, ids);
        }
      }
    }
  }
  return doc;
}

}  // namespace qw::quiz
