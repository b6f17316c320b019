#include "quizwright/server/data_store.hpp"

#include <fstream>
#include <sstream>

#include "quizwright/digest.hpp"

namespace qw::server {

namespace fs = std::filesystem;

UserStore UserStore::from_xml(std::string_view text) {
  auto doc = xml::parse_tree(text);
  auto violations = schema::validate(doc, schema::builtin("users"));
  if (!violations.empty()) {
    std::string message = "users file failed validation:";
    for (const auto& v : violations) {
      message += "\n  " + v.path + ": " + std::string(schema::to_string(v.rule)) + ": " + v.message;
    }
    throw quiz::QuizError(message, std::move(violations));
  }
  UserStore store;
  for (const xml::Element* user : doc.root.child_elements("user")) {
    const std::string& id = *user->attribute("id");
    if (!store.digests_.emplace(id, *user->attribute("digest")).second) {
      throw quiz::QuizError("duplicate user id '" + id + "'");
    }
  }
  return store;
}

bool UserStore::authenticate(std::string_view user_id, std::string_view password) const {
  auto it = digests_.find(user_id);
  return it != digests_.end() && it->second == digest::md5(password).to_hex();
}

void UserStore::set_password(const std::string& user_id, std::string_view password) {
  digests_[user_id] = digest::md5(password).to_hex();
}

xml::XmlDocument UserStore::to_document() const {
  xml::XmlDocument doc{xml::Element{"users", {}, {}}};
  for (const auto& [id, hex] : digests_) {
    doc.root.children.emplace_back(xml::Element{"user", {{"id", id}, {"digest", hex}}, {}});
  }
  return doc;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomically(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp.replace_filename("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

template <typename F>
auto load_part(const fs::path& path, std::vector<std::string>& problems, F&& parse) -> decltype(parse(std::string())) {
  try {
    return parse(read_text_file(path));
  } catch (const std::exception& e) {
    problems.push_back(path.string() + ": " + e.what());
  }
  return {};
}

}  // namespace

ServerData load_data_dir(const fs::path& data_dir) {
  std::vector<std::string> problems;
  ServerData data;
  data.config = load_part(data_dir / "testconfig.xml", problems, [](const std::string& t) { return quiz::load_test_config(t); });
  data.users = load_part(data_dir / "users.xml", problems, [](const std::string& t) { return UserStore::from_xml(t); });
  if (!data.config.bank_path.empty()) {
    fs::path bank_path = fs::path(data.config.bank_path).is_absolute() ? fs::path(data.config.bank_path)
                                                                       : data_dir / data.config.bank_path;
    data.bank = load_part(bank_path, problems, [](const std::string& t) { return quiz::load_bank(t); });
    if (problems.empty() && data.config.question_count > data.bank.questions.size()) {
      problems.push_back("test '" + data.config.id + "' asks for " + std::to_string(data.config.question_count) +
                         " questions but the bank has " + std::to_string(data.bank.questions.size()));
    }
  }
  if (!problems.empty()) {
    std::string message = "invalid data directory " + data_dir.string() + ":";
    for (const auto& p : problems) message += "\n" + p;
    throw StartupError(message);
  }
  data.results_dir = data_dir / "results";
  fs::create_directories(data.results_dir);
  return data;
}

}  // namespace qw::server
