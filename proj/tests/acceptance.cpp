// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <thread>

#include "quizwright/digest.hpp"
#include "quizwright/protocol.hpp"
#include "quizwright/quizbank.hpp"
#include "quizwright/schema.hpp"
#include "quizwright/server/session_manager.hpp"
#include "quizwright/server/tcp_server.hpp"
#include "quizwright/xml.hpp"
#include "support/generators.hpp"
#include "support/server_harness.hpp"
#include "support/xml_oracle.hpp"

using namespace qw;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// A criterion body returns an empty string on success or a failure reason,
// and may fill `detail` with counts for the report line.
using Check = std::function<std::string(std::string& detail)>;

bool run_criterion(const std::string& name, double limit_seconds, const Check& check) {
  std::string detail, failure;
  auto t0 = Clock::now();
  try {
    failure = check(detail);
  } catch (const std::exception& e) {
    failure = std::string("exception: ") + e.what();
  }
  double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  if (failure.empty() && limit_seconds > 0 && elapsed >= limit_seconds) {
    failure = "took " + std::to_string(elapsed) + " s, limit " + std::to_string(limit_seconds) + " s";
  }
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.3f s", elapsed);
  std::cout << (failure.empty() ? "PASS" : "FAIL") << "  " << name << "  (" << timing;
  if (limit_seconds > 0) std::cout << " / limit " << limit_seconds << " s";
  std::cout << ")";
  if (!detail.empty()) std::cout << "  " << detail;
  if (!failure.empty()) std::cout << "  -- " << failure;
  std::cout << std::endl;
  return failure.empty();
}

// ---------------------------------------------------------------------------

std::string openssl_md5_hex(const std::vector<std::uint8_t>& data) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out, &len, EVP_md5(), nullptr);
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    hex += kDigits[out[i] >> 4];
    hex += kDigits[out[i] & 0x0F];
  }
  return hex;
}

std::string md5_criterion(std::string& detail) {
  const std::vector<std::pair<std::string, std::string>> rfc{
      {"", "d41d8cd98f00b204e9800998ecf8427e"},
      {"a", "0cc175b9c0f1b6a831c399e269772661"},
      {"abc", "900150983cd24fb0d6963f7d28e17f72"},
      {"message digest", "f96b697d7cb7938d525a2f31aaf161d0"},
      {"abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"},
      {"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789", "d174ab98d277d9f5a5611c2c9f419d9f"},
      {"12345678901234567890123456789012345678901234567890123456789012345678901234567890",
       "57edf4a22be3c955ac49da2e2107b67a"},
  };
  for (const auto& [input, expected] : rfc) {
    if (digest::md5(input).to_hex() != expected) return "RFC vector mismatch for \"" + input + "\"";
  }
  testing::Rng rng(1321);
  std::vector<std::size_t> lengths{0, 1, 55, 56, 57, 63, 64, 65, 119, 120, 127, 128, 129};
  while (lengths.size() < 1000) lengths.push_back(testing::uniform(rng, 0, 3000));
  for (std::size_t len : lengths) {
    std::vector<std::uint8_t> data(len);
    for (auto& b : data) b = static_cast<std::uint8_t>(testing::uniform(rng, 0, 255));
    if (digest::md5(data).to_hex() != openssl_md5_hex(data)) return "disagrees with OpenSSL at length " + std::to_string(len);
  }
  detail = "7 RFC vectors, " + std::to_string(lengths.size()) + " random inputs vs OpenSSL";
  return {};
}

// ---------------------------------------------------------------------------

struct WfMutation {
  std::string name;
  xml::ParseErrorKind expected;
  std::function<std::string(const std::string& canonical, std::size_t body_at)> apply;
};

// Each operator works on a canonical serialization whose root has content;
// `body_at` is the offset just past the root start tag.
const std::vector<WfMutation>& wf_mutations() {
  static const std::vector<WfMutation> ops{
      {"drop root end tag", xml::ParseErrorKind::Nesting,
       [](const std::string& s, std::size_t) { return s.substr(0, s.rfind("</")); }},
      {"rename root end tag", xml::ParseErrorKind::Nesting,
       [](const std::string& s, std::size_t) {
         std::string out = s;
         out.insert(out.rfind('>'), "Z");
         return out;
       }},
      {"duplicate attribute", xml::ParseErrorKind::DuplicateAttribute,
       [](const std::string& s, std::size_t at) {
         std::string out = s;
         out.insert(at - 1, " dup=\"1\" dup=\"2\"");
         return out;
       }},
      {"undefined entity", xml::ParseErrorKind::BadEntity,
       [](const std::string& s, std::size_t at) {
         std::string out = s;
         out.insert(at, "&bogus;");
         return out;
       }},
      {"bare '<' in text", xml::ParseErrorKind::Syntax,
       [](const std::string& s, std::size_t at) {
         std::string out = s;
         out.insert(at, "a < b");
         return out;
       }},
      {"invalid UTF-8 byte", xml::ParseErrorKind::Encoding,
       [](const std::string& s, std::size_t at) {
         std::string out = s;
         out.insert(at, "\xFF");
         return out;
       }},
      {"second root element", xml::ParseErrorKind::Syntax,
       [](const std::string& s, std::size_t) { return s + "<extra/>"; }},
  };
  return ops;
}

std::string parser_criterion(std::string& detail) {
  testing::Rng rng(636);
  std::map<std::string, int> detected;
  for (int i = 0; i < 1000; ++i) {
    auto doc = testing::random_document(rng);
    std::string noisy = testing::render_noisy(rng, doc);
    auto tree = xml::parse_tree(noisy);
    if (!(tree == testing::oracle_tree(noisy))) return "event/tree mismatch on document " + std::to_string(i);
    if (!(tree == doc)) return "parse differs from the generated tree on document " + std::to_string(i);
    std::string once = xml::serialize(tree);
    if (xml::serialize(xml::parse_tree(once)) != once) return "serialize/parse not a fixpoint on document " + std::to_string(i);

    if (doc.root.children.empty()) doc.root.children.emplace_back(xml::Text{"first\nsecond"});
    const std::string canonical = xml::serialize(doc);
    const std::size_t body_at = canonical.find('>', canonical.find('<' + doc.root.name)) + 1;
    for (const auto& op : wf_mutations()) {
      std::string mutated = op.apply(canonical, body_at);
      const std::size_t lines = 1 + static_cast<std::size_t>(std::count(mutated.begin(), mutated.end(), '\n'));
      try {
        xml::parse_events(mutated, [](const xml::XmlEvent&) {});
        return "'" + op.name + "' not detected on document " + std::to_string(i);
      } catch (const xml::ParseError& e) {
        if (e.kind() != op.expected) {
          return "'" + op.name + "' reported " + std::string(xml::to_string(e.kind())) + " on document " + std::to_string(i);
        }
        if (e.line() < 1 || e.line() > lines || e.column() < 1) {
          return "'" + op.name + "' position " + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                 " outside a " + std::to_string(lines) + "-line input";
        }
        ++detected[op.name];
      }
    }
  }
  detail = "1000 documents; " + std::to_string(detected.size()) + " mutation operators x 1000 detected";
  return {};
}

// ---------------------------------------------------------------------------

struct SchemaMutation {
  std::string name;
  schema::Rule expected;
  std::function<void(xml::XmlDocument&)> apply;
};

xml::Element& first_question(xml::XmlDocument& doc) {
  return *doc.root.child_elements("question")[0];
}

void drop_children(xml::Element& e, const std::string& name, std::size_t keep) {
  std::size_t seen = 0;
  std::erase_if(e.children, [&](const xml::XmlNode& n) {
    return n.is_element() && n.element().name == name && seen++ >= keep;
  });
}

std::string validator_criterion(std::string& detail) {
  const std::vector<SchemaMutation> ops{
      {"drop required attribute", schema::Rule::MissingAttr,
       [](xml::XmlDocument& d) { first_question(d).remove_attribute("points"); }},
      {"non-digit integer", schema::Rule::BadAttrType,
       [](xml::XmlDocument& d) { d.root.set_attribute("version", "one"); }},
      {"exceed max occurs", schema::Rule::Cardinality,
       [](xml::XmlDocument& d) {
         auto& q = first_question(d);
         q.children.emplace_back(xml::Element{"answer", {{"digest", "00000000000000000000000000000000"}}, {}});
       }},
      {"drop below min occurs", schema::Rule::Cardinality,
       [](xml::XmlDocument& d) { drop_children(first_question(d), "choice", 1); }},
      {"rename root", schema::Rule::BadRoot, [](xml::XmlDocument& d) { d.root.name = "questionbank"; }},
      {"insert undeclared element", schema::Rule::UnknownElement,
       [](xml::XmlDocument& d) { first_question(d).children.emplace_back(xml::Element{"hint", {}, {}}); }},
      {"child elements under text content", schema::Rule::BadContent,
       [](xml::XmlDocument& d) {
         auto& text = *first_question(d).child_elements("text")[0];
         text.children.emplace_back(xml::Element{"choice", {{"id", "x"}}, {}});
       }},
  };
  const xml::XmlDocument bank = xml::parse_tree(testing::fixture("bank.xml"));
  for (const auto& op : ops) {
    xml::XmlDocument mutated = bank;
    op.apply(mutated);
    auto v = schema::validate(mutated, schema::builtin("quizbank"));
    bool found = std::any_of(v.begin(), v.end(), [&](const schema::Violation& x) { return x.rule == op.expected; });
    if (!found) return "'" + op.name + "' did not produce " + std::string(schema::to_string(op.expected));
  }
  const std::vector<std::pair<std::string, std::string>> fixtures{
      {"bank.xml", "quizbank"}, {"testconfig.xml", "testconfig"}, {"users.xml", "users"}, {"result.xml", "result"}};
  for (const auto& [file, schema_name] : fixtures) {
    auto v = schema::validate(xml::parse_tree(testing::fixture(file)), schema::builtin(schema_name));
    if (!v.empty()) return file + " has " + std::to_string(v.size()) + " violations";
  }
  detail = std::to_string(ops.size()) + " operators killed, 4 fixtures clean";
  return {};
}

// ---------------------------------------------------------------------------

std::vector<quiz::ChoiceSet> answer_options(const quiz::Question& q) {
  std::vector<quiz::ChoiceSet> out{{}};  // unanswered
  const std::size_t n = q.choices.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    quiz::ChoiceSet s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.insert(q.choices[i].id);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string grading_criterion(std::string& detail) {
  testing::Rng rng(638);
  std::size_t maps = 0;
  for (int b = 0; b < 100; ++b) {
    auto keyed = testing::random_keyed_bank(rng, 2, 5);
    const auto& qs = keyed.bank.questions;
    const int max_points = qs[0].points + qs[1].points;
    auto opts0 = answer_options(qs[0]);
    auto opts1 = answer_options(qs[1]);
    for (const auto& a0 : opts0) {
      for (const auto& a1 : opts1) {
        quiz::AnswerMap answers;
        if (!a0.empty()) answers["q1"] = a0;
        if (!a1.empty()) answers["q2"] = a1;
        auto r = quiz::grade(qs, answers);
        int plain = 0;
        for (const auto& q : qs) {
          auto it = answers.find(q.id);
          if (it != answers.end() && it->second == keyed.keys.at(q.id)) plain += q.points;
        }
        ++maps;
        if (r.points != plain) return "bank " + std::to_string(b) + ": digest grading differs from plaintext";
        if (r.max_points != max_points || r.points < 0 || r.points > r.max_points) return "score out of bounds";
        if (r.percent < quiz::Percent::from_hundredths(0) || r.percent > quiz::Percent::from_hundredths(10000)) {
          return "percent out of bounds";
        }
        for (const auto& q : qs) {
          auto improved = answers;
          improved[q.id] = keyed.keys.at(q.id);
          auto better = quiz::grade(qs, improved);
          if (better.points < r.points || better.percent < r.percent) return "correcting an answer lowered the score";
        }
      }
    }
  }
  detail = "100 banks, " + std::to_string(maps) + " answer maps";
  return {};
}

// ---------------------------------------------------------------------------

std::string selection_criterion(std::string& detail) {
  quiz::QuizBank bank;
  bank.subject = "S";
  for (int i = 1; i <= 5; ++i) {
    quiz::Question q;
    q.id = "q" + std::to_string(i);
    q.choices = {{"a", "A"}, {"b", "B"}};
    q.key_digest = digest::answer_digest(q.id, {"a"});
    bank.questions.push_back(q);
  }
  auto order = [&](std::size_t count) {
    std::string s;
    for (const auto& q : quiz::select_questions(bank, {"t", "", count, true}, 42)) s += (s.empty() ? "" : ",") + q.id;
    return s;
  };
  // Hand trace of SplitMix64(42): j = 3, 3, 0, 0 for i = 4, 3, 2, 1.
  if (order(5) != "q2,q3,q1,q5,q4") return "full permutation is " + order(5);
  if (order(3) != "q2,q3,q1") return "first three are " + order(3);
  for (int run = 0; run < 100; ++run) {
    if (order(3) != "q2,q3,q1" || order(5) != "q2,q3,q1,q5,q4") return "run " + std::to_string(run) + " differs";
  }
  detail = "seed 42 -> q2,q3,q1 (full q2,q3,q1,q5,q4), 100 identical runs";
  return {};
}

// ---------------------------------------------------------------------------

struct StudentOutcome {
  std::string session_id;
  std::string percent;
  bool double_start_rejected = false;
  bool late_answer_rejected = false;
  std::string error;
};

StudentOutcome run_student(std::uint16_t port, int index, const std::map<std::string, quiz::ChoiceSet>& keys) {
  using namespace protocol;
  StudentOutcome out;
  try {
    testing::Rng rng(static_cast<std::uint64_t>(index) * 7919);
    testing::LineClient c(port);
    testing::expect<Welcome>(c.request(Hello{Role::Student, 1}));
    out.session_id = testing::expect<SessionCreated>(c.request(Register{"Student " + std::to_string(index), 2, "DB"})).session_id;
    auto paper = testing::expect<TestPaper>(c.request(Start{out.session_id}));
    out.double_start_rejected = testing::error_code(c.request(Start{out.session_id})) == ErrorCode::State;
    for (const auto& q : paper.questions) {
      std::vector<std::string> pick;
      if (testing::uniform(rng, 0, 1)) {
        pick.assign(keys.at(q.id).begin(), keys.at(q.id).end());
      } else {
        pick.push_back(q.choices[testing::uniform(rng, 0, q.choices.size() - 1)].id);
      }
      testing::expect<Ack>(c.request(Answer{out.session_id, q.id, pick}));
    }
    out.percent = testing::expect<Result>(c.request(Finish{out.session_id})).percent;
    const auto& first = paper.questions.front();
    out.late_answer_rejected =
        testing::error_code(c.request(Answer{out.session_id, first.id, {first.choices[0].id}})) == ErrorCode::State;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::string end_to_end_criterion(std::string& detail) {
  constexpr int kStudents = 50;
  testing::TempDir dir;
  testing::Rng rng(640);
  auto keyed = testing::random_keyed_bank(rng, 10);
  testing::write_data_dir(dir.path(), xml::serialize(testing::bank_document(keyed.bank)), 10, true, "e2e");
  auto data = std::make_shared<const server::ServerData>(server::load_data_dir(dir.path()));
  server::SessionManager manager(data, 2026);
  server::TcpServer tcp(manager, 0, "127.0.0.1");

  using namespace protocol;
  testing::LineClient monitor(tcp.port());
  testing::expect<Welcome>(monitor.request(Hello{Role::Monitor, 1}));
  testing::expect<Ack>(monitor.request(Auth{"prof1", "secret"}));

  std::vector<StudentOutcome> outcomes(kStudents);
  std::vector<std::thread> threads;
  for (int i = 0; i < kStudents; ++i) {
    threads.emplace_back([&, i] { outcomes[i] = run_student(tcp.port(), i, keyed.keys); });
  }
  for (auto& t : threads) t.join();

  std::map<std::string, std::map<EventKind, int>> events;
  int finished = 0;
  while (finished < kStudents) {
    auto line = monitor.read_line(std::chrono::seconds(3));
    if (!line) break;
    Message m = decode(*line);
    const auto* e = std::get_if<Event>(&m);
    if (!e) continue;
    ++events[e->session_id][e->kind];
    if (e->kind == EventKind::Finished) ++finished;
  }

  std::map<std::string, std::string> client_percent;
  for (const auto& o : outcomes) {
    if (!o.error.empty()) return "student " + o.session_id + ": " + o.error;
    if (!o.double_start_rejected) return o.session_id + ": double START was not E_STATE";
    if (!o.late_answer_rejected) return o.session_id + ": ANSWER after FINISH was not E_STATE";
    client_percent[o.session_id] = o.percent;
  }
  if (client_percent.size() != kStudents) return "session ids were not distinct";

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(data->results_dir)) {
    ++files;
    const std::string name = entry.path().filename().string();
    auto doc = xml::parse_tree(server::read_text_file(entry.path()));
    auto v = schema::validate(doc, schema::builtin("result"));
    if (!v.empty()) return name + " fails result validation: " + v[0].message;
    auto it = client_percent.find(*doc.root.attribute("session"));
    if (it == client_percent.end() || entry.path().stem() != it->first) return name + " names an unknown session";
    const std::string file_percent = *doc.root.child_elements("score")[0]->attribute("percent");
    if (file_percent != it->second) return name + " percent " + file_percent + " but RESULT said " + it->second;
  }
  if (files != kStudents) return std::to_string(files) + " result files, expected " + std::to_string(kStudents);

  if (events.size() != kStudents) return "monitor saw " + std::to_string(events.size()) + " sessions";
  for (const auto& [sid, kinds] : events) {
    for (auto kind : {EventKind::Registered, EventKind::Started, EventKind::Finished}) {
      auto it = kinds.find(kind);
      if (it == kinds.end() || it->second != 1) {
        return sid + ": monitor saw " + std::to_string(it == kinds.end() ? 0 : it->second) + " " +
               std::string(to_string(kind)) + " events";
      }
    }
  }
  detail = std::to_string(kStudents) + " students, " + std::to_string(files) +
           " valid result files, 50 event triples, abuse messages rejected";
  return {};
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run_criterion("md5: RFC 1321 vectors and 1000 random inputs agree with OpenSSL", 1.0, md5_criterion);
  ok &= run_criterion("parser: 1000-document corpus, equivalence, fixpoint, 7 well-formedness mutations", 5.0,
                      parser_criterion);
  ok &= run_criterion("validator: 7 schema mutations give the expected rules, 4 fixtures valid", 1.0,
                      validator_criterion);
  ok &= run_criterion("grading: digest equals plaintext over 100 exhaustive 2-question banks", 10.0,
                      grading_criterion);
  ok &= run_criterion("selection: seed 42 golden permutation, repeatable", 0, selection_criterion);
  ok &= run_criterion("end-to-end: 50 concurrent students, results, monitor, FSM abuse", 10.0, end_to_end_criterion);
  return ok ? 0 : 1;
}
