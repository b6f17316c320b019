#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "quizwright/quizbank.hpp"
#include "quizwright/schema.hpp"

namespace qw::server {

/// Professor accounts: user id -> hex MD5 of the password.
class UserStore {
 public:
  UserStore() = default;

  /// Parses and validates a users document. Throws quiz::QuizError on
  /// violations or duplicate ids.
  static UserStore from_xml(std::string_view text);

  bool authenticate(std::string_view user_id, std::string_view password) const;

  /// Inserts or replaces the entry for user_id.
  void set_password(const std::string& user_id, std::string_view password);

  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return digests_; }
  xml::XmlDocument to_document() const;

 private:
  std::map<std::string, std::string, std::less<>> digests_;
};

/// Everything the server needs from its data directory; immutable once
/// loaded.
struct ServerData {
  quiz::QuizBank bank;
  quiz::TestConfig config;
  UserStore users;
  std::filesystem::path results_dir;
};

/// Startup validation failure. The message lists every finding.
class StartupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads testconfig.xml, the bank it names, and users.xml from `data_dir`,
/// creating results/ if needed.
ServerData load_data_dir(const std::filesystem::path& data_dir);

std::string read_text_file(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory and a rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);

}  // namespace qw::server
