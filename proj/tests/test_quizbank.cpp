#include <set>

#include "doctest.h"
#include "quizwright/quizbank.hpp"
#include "support/generators.hpp"

using namespace qw;
using namespace qw::quiz;

namespace {

QuizBank five_questions() {
  QuizBank bank;
  bank.subject = "S";
  for (int i = 1; i <= 5; ++i) {
    Question q;
    q.id = "q" + std::to_string(i);
    q.choices = {{"a", "A"}, {"b", "B"}};
    q.key_digest = digest::answer_digest(q.id, {"a"});
    bank.questions.push_back(q);
  }
  return bank;
}

std::vector<std::string> ids(const std::vector<Question>& qs) {
  std::vector<std::string> out;
  for (const auto& q : qs) out.push_back(q.id);
  return out;
}

// Plaintext oracle: exact set equality against the retained keys.
int plaintext_points(std::span<const Question> qs, const std::map<std::string, ChoiceSet>& keys, const AnswerMap& answers) {
  int points = 0;
  for (const auto& q : qs) {
    auto it = answers.find(q.id);
    if (it != answers.end() && it->second == keys.at(q.id)) points += q.points;
  }
  return points;
}

std::vector<ChoiceSet> all_subsets(const Question& q) {
  std::vector<ChoiceSet> out;
  const std::size_t n = q.choices.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    ChoiceSet s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.insert(q.choices[i].id);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("load_bank on the fixture") {
  auto bank = load_bank(testing::fixture("bank.xml"));
  CHECK(bank.subject == "Databases");
  CHECK(bank.version == 1);
  REQUIRE(bank.questions.size() == 3);
  const auto& q1 = bank.questions[0];
  CHECK(q1.id == "q1");
  CHECK(q1.kind == QuestionKind::Single);
  CHECK(q1.points == 2);
  CHECK(q1.text == "Which clause filters rows?");
  CHECK(q1.choices.size() == 3);
  CHECK(q1.choices[1] == Choice{"b", "WHERE"});
  CHECK(q1.key_digest == "bb92f7fadf3c77ca55c7518e153f355f");
  CHECK(bank.questions[1].kind == QuestionKind::Multi);
  CHECK(bank.questions[2].text == "Which key uniquely identifies a row & cannot be NULL?");
}

TEST_CASE("load_bank errors") {
  std::string text = testing::fixture("bank.xml");
  SUBCASE("duplicate question id") {
    std::string dup = text;
    dup.replace(dup.find(R"(id="q2")"), 7, R"(id="q1")");
    CHECK_THROWS_WITH_AS(load_bank(dup), doctest::Contains("duplicate question id 'q1'"), QuizError);
  }
  SUBCASE("31-character digest") {
    std::string bad = text;
    bad.replace(bad.find("bb92f7fadf3c77ca55c7518e153f355f"), 32, "bb92f7fadf3c77ca55c7518e153f355");
    try {
      load_bank(bad);
      FAIL("expected QuizError");
    } catch (const QuizError& e) {
      REQUIRE(e.violations().size() == 1);
      CHECK(e.violations()[0].rule == schema::Rule::BadAttrType);
    }
  }
  SUBCASE("zero points") {
    std::string bad = text;
    bad.replace(bad.find(R"(points="2")"), 10, R"(points="0")");
    CHECK_THROWS_AS(load_bank(bad), QuizError);
  }
  SUBCASE("parse errors pass through") {
    CHECK_THROWS_AS(load_bank("<quizbank"), xml::ParseError);
  }
}

TEST_CASE("load_test_config") {
  auto config = load_test_config(testing::fixture("testconfig.xml"));
  CHECK(config.id == "t1");
  CHECK(config.bank_path == "banks/db.xml");
  CHECK(config.question_count == 2);
  CHECK(config.shuffle);
  CHECK_THROWS_AS(load_test_config(R"(<testconfig id="t1" bank="b" questions="0" shuffle="true"/>)"), QuizError);
  CHECK_THROWS_AS(load_test_config(R"(<testconfig id="t1" bank="b" questions="2" shuffle="yes"/>)"), QuizError);
}

TEST_CASE("hash_answers") {
  auto author = xml::parse_tree(testing::fixture("bank_authoring.xml"));
  auto hashed = hash_answers(author);
  SUBCASE("matches the pre-computed bank") {
    CHECK(hashed == xml::parse_tree(testing::fixture("bank.xml")));
  }
  SUBCASE("round trip through serialization validates") {
    auto reparsed = xml::parse_tree(xml::serialize(hashed));
    CHECK(schema::validate(reparsed, schema::builtin("quizbank")).empty());
  }
  SUBCASE("key order does not matter") {
    auto a = xml::parse_tree(R"(<quizbank subject="s" version="1"><question id="q1" type="multi" points="1"><text>t</text>
      <choice id="b">B</choice><choice id="d">D</choice><answer key="b,d"/></question></quizbank>)");
    auto b = xml::parse_tree(R"(<quizbank subject="s" version="1"><question id="q1" type="multi" points="1"><text>t</text>
      <choice id="b">B</choice><choice id="d">D</choice><answer key="d,b"/></question></quizbank>)");
    CHECK(hash_answers(a) == hash_answers(b));
    auto hashed_a = hash_answers(a);
    auto answer = hashed_a.root.child_elements("question")[0]->child_elements("answer")[0];
    CHECK(*answer->attribute("digest") == "d25fcb323dcc165fdfd4f558561b0b03");
    CHECK(answer->attribute("key") == nullptr);
  }
  SUBCASE("unknown choice names question and choice") {
    auto doc = xml::parse_tree(R"(<quizbank subject="s" version="1"><question id="q7" type="single" points="1"><text>t</text>
      <choice id="a">A</choice><choice id="b">B</choice><answer key="z"/></question></quizbank>)");
    try {
      hash_answers(doc);
      FAIL("expected QuizError");
    } catch (const QuizError& e) {
      std::string msg = e.what();
      CHECK(msg.find("q7") != std::string::npos);
      CHECK(msg.find("'z'") != std::string::npos);
    }
  }
  SUBCASE("single question with two keys") {
    auto doc = xml::parse_tree(R"(<quizbank subject="s" version="1"><question id="q1" type="single" points="1"><text>t</text>
      <choice id="a">A</choice><choice id="b">B</choice><answer key="a,b"/></question></quizbank>)");
    CHECK_THROWS_AS(hash_answers(doc), QuizError);
  }
}

TEST_CASE("SplitMix64 first output for seed 42") {
  SplitMix64 rng(42);
  CHECK(rng.next() == 0xbdd732262feb6e95ULL);
  CHECK(rng.next() == 0x28efe333b266f103ULL);
}

TEST_CASE("select_questions") {
  auto bank = five_questions();
  SUBCASE("unshuffled takes the bank prefix") {
    CHECK(ids(select_questions(bank, {"t", "", 2, false}, 123)) == std::vector<std::string>{"q1", "q2"});
  }
  SUBCASE("seed 42 golden permutation") {
    // Hand trace: j = 3, 3, 0, 0 for i = 4, 3, 2, 1.
    CHECK(ids(select_questions(bank, {"t", "", 3, true}, 42)) == std::vector<std::string>{"q2", "q3", "q1"});
    CHECK(ids(select_questions(bank, {"t", "", 5, true}, 42)) ==
          std::vector<std::string>{"q2", "q3", "q1", "q5", "q4"});
  }
  SUBCASE("deterministic") {
    for (std::uint64_t seed : {0ULL, 1ULL, 0xFFFFFFFFFFFFFFFFULL}) {
      CHECK(ids(select_questions(bank, {"t", "", 4, true}, seed)) == ids(select_questions(bank, {"t", "", 4, true}, seed)));
    }
  }
  SUBCASE("count larger than bank") {
    CHECK_THROWS_AS(select_questions(bank, {"t", "", 6, false}, 0), QuizError);
  }
  SUBCASE("property: distinct questions from the bank") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto picked = ids(select_questions(bank, {"t", "", 1 + seed % 5, true}, seed));
      std::set<std::string> unique(picked.begin(), picked.end());
      CHECK(picked.size() == 1 + seed % 5);
      CHECK(unique.size() == picked.size());
      for (const auto& id : picked) CHECK(bank.find(id) != nullptr);
    }
  }
}

TEST_CASE("percent rounding") {
  CHECK(Percent::of(2, 4).to_string() == "50.00");
  CHECK(Percent::of(0, 7).to_string() == "0.00");
  CHECK(Percent::of(7, 7).to_string() == "100.00");
  CHECK(Percent::of(1, 3).to_string() == "33.33");
  CHECK(Percent::of(2, 3).to_string() == "66.67");
  CHECK(Percent::of(1, 8).to_string() == "12.50");
  // 1/16 = 6.25 exactly; 1/160 = 0.625 -> 0.63 (half up)
  CHECK(Percent::of(1, 160).to_string() == "0.63");
  CHECK(Percent::of(1, 16).to_string() == "6.25");
  CHECK(Percent::of(1, 200).to_string() == "0.50");
}

TEST_CASE("grade") {
  auto bank = load_bank(testing::fixture("bank.xml"));
  std::span<const Question> qs = bank.questions;
  SUBCASE("all correct") {
    auto r = grade(qs, {{"q1", {"b"}}, {"q2", {"c", "a"}}, {"q3", {"c"}}});
    CHECK(r.points == 6);
    CHECK(r.max_points == 6);
    CHECK(r.percent.to_string() == "100.00");
  }
  SUBCASE("nothing answered") {
    auto r = grade(qs, {});
    CHECK(r.points == 0);
    CHECK(r.percent.to_string() == "0.00");
    CHECK(r.per_question.size() == 3);
  }
  SUBCASE("multi needs the exact set") {
    auto r = grade(qs, {{"q2", {"a"}}});
    CHECK_FALSE(r.per_question[1].correct);
    CHECK(r.points == 0);
  }
  SUBCASE("unpresented question") {
    CHECK_THROWS_AS(grade(qs.first(2), {{"q3", {"c"}}}), QuizError);
  }
  SUBCASE("four one-point questions, two correct") {
    auto four = five_questions();
    four.questions.pop_back();
    auto r = grade(four.questions, {{"q1", {"a"}}, {"q2", {"a"}}, {"q3", {"b"}}});
    CHECK(r.points == 2);
    CHECK(r.max_points == 4);
    CHECK(r.percent.to_string() == "50.00");
  }
}

TEST_CASE("property: digest grading equals plaintext grading, exhaustively") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto keyed = testing::random_keyed_bank(rng, 2);
    const auto& qs = keyed.bank.questions;
    auto opts0 = all_subsets(qs[0]);
    auto opts1 = all_subsets(qs[1]);
    opts0.emplace_back();  // unanswered
    opts1.emplace_back();
    for (const auto& a0 : opts0) {
      for (const auto& a1 : opts1) {
        AnswerMap answers;
        if (!a0.empty()) answers["q1"] = a0;
        if (!a1.empty()) answers["q2"] = a1;
        auto r = grade(qs, answers);
        REQUIRE(r.points == plaintext_points(qs, keyed.keys, answers));
      }
    }
  }
}
