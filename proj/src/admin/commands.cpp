#include "quizwright/admin.hpp"

#include <random>

#include "CLI11.hpp"
#include "quizwright/quizbank.hpp"
#include "quizwright/schema.hpp"
#include "quizwright/server/data_store.hpp"
#include "quizwright/server/http_gateway.hpp"
#include "quizwright/server/session_manager.hpp"
#include "quizwright/server/tcp_server.hpp"

namespace qw::admin {

namespace fs = std::filesystem;

namespace {

void print_violations(const std::vector<schema::Violation>& violations, std::ostream& out) {
  for (const auto& v : violations) out << v.path << ": " << schema::to_string(v.rule) << ": " << v.message << '\n';
}

std::optional<std::string> read_or_report(const fs::path& file, std::ostream& err) {
  try {
    return server::read_text_file(file);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

}  // namespace

int bank_validate(const fs::path& file, std::ostream& out, std::ostream& err) {
  auto text = read_or_report(file, err);
  if (!text) return kExitIo;
  xml::XmlDocument doc;
  try {
    doc = xml::parse_tree(*text);
  } catch (const xml::ParseError& e) {
    out << file.string() << ":" << e.line() << ":" << e.column() << ": " << xml::to_string(e.kind()) << ": "
        << e.detail() << '\n';
    return kExitInvalid;
  }
  auto violations = schema::validate(doc, schema::builtin("quizbank"));
  if (!violations.empty()) {
    print_violations(violations, out);
    return kExitInvalid;
  }
  try {
    quiz::bank_from_document(doc);
  } catch (const quiz::QuizError& e) {
    out << e.what() << '\n';
    return kExitInvalid;
  }
  out << "OK\n";
  return kExitOk;
}

int bank_hash(const fs::path& in, const fs::path& out_path, std::ostream& out, std::ostream& err) {
  auto text = read_or_report(in, err);
  if (!text) return kExitIo;
  xml::XmlDocument hashed;
  try {
    hashed = quiz::hash_answers(xml::parse_tree(*text));
    quiz::bank_from_document(hashed);
  } catch (const quiz::QuizError& e) {
    err << "error: " << e.what() << '\n';
    print_violations(e.violations(), err);
    return kExitInvalid;
  } catch (const xml::ParseError& e) {
    err << "error: " << in.string() << ": " << e.what() << '\n';
    return kExitInvalid;
  }
  try {
    server::write_file_atomically(out_path, xml::serialize(hashed));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  out << "wrote " << out_path.string() << '\n';
  return kExitOk;
}

int user_add(const std::string& user_id, const std::string& password, const fs::path& data_dir, std::ostream& out,
             std::ostream& err) {
  if (!schema::matches_type(schema::ValueType::IdToken, {}, user_id)) {
    err << "error: '" << user_id << "' is not a valid user id (letters, digits, '_', '-', '.')\n";
    return kExitInvalid;
  }
  if (password.empty()) {
    err << "error: password must not be empty\n";
    return kExitInvalid;
  }
  const fs::path file = data_dir / "users.xml";
  server::UserStore store;
  std::error_code ec;
  if (fs::exists(file, ec)) {
    auto text = read_or_report(file, err);
    if (!text) return kExitIo;
    try {
      store = server::UserStore::from_xml(*text);
    } catch (const quiz::QuizError& e) {
      err << "error: " << file.string() << ": " << e.what() << '\n';
      return kExitInvalid;
    } catch (const xml::ParseError& e) {
      err << "error: " << file.string() << ": " << e.what() << '\n';
      return kExitInvalid;
    }
  }
  const bool replaced = store.entries().count(user_id) != 0;
  store.set_password(user_id, password);
  try {
    fs::create_directories(data_dir);
    server::write_file_atomically(file, xml::serialize(store.to_document()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  out << (replaced ? "updated " : "added ") << user_id << " in " << file.string() << '\n';
  return kExitOk;
}

int serve(const ServeOptions& options, std::ostream& out, std::ostream& err,
          const std::function<void()>& wait_for_shutdown) {
  std::shared_ptr<const server::ServerData> data;
  try {
    data = std::make_shared<const server::ServerData>(server::load_data_dir(options.data_dir));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  std::uint64_t nonce = 0;
  if (options.nonce) {
    nonce = *options.nonce;
  } else {
    std::random_device rd;
    nonce = (std::uint64_t{rd()} << 32) | rd();
  }
  server::SessionManager manager(data, nonce);
  std::unique_ptr<server::TcpServer> tcp;
  std::unique_ptr<server::HttpGateway> gateway;
  try {
    tcp = std::make_unique<server::TcpServer>(manager, options.port, options.host);
    gateway = std::make_unique<server::HttpGateway>(manager, options.http_port, options.web_root, options.host);
  } catch (const server::BindError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  out << "listening tcp " << options.host << ":" << tcp->port() << '\n'
      << "listening http " << options.host << ":" << gateway->port() << '\n'
      << "test " << data->config.id << ": " << data->config.question_count << " of " << data->bank.questions.size()
      << " questions from '" << data->bank.subject << "'" << std::endl;
  wait_for_shutdown();
  gateway->stop();
  tcp->stop();
  out << "stopped" << std::endl;
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::function<std::optional<std::string>()>& read_password,
        const std::function<void()>& wait_for_shutdown) {
  CLI::App app{"quizwright: quiz bank tools and test server", "quizwright"};
  app.require_subcommand(1);

  auto* bank = app.add_subcommand("bank", "Validate or hash question banks");
  bank->require_subcommand(1);
  std::string validate_file;
  auto* validate = bank->add_subcommand("validate", "Check a bank against the quizbank schema");
  validate->add_option("file", validate_file)->required();
  std::string hash_in, hash_out;
  auto* hash = bank->add_subcommand("hash", "Replace plaintext answer keys with digests");
  hash->add_option("in", hash_in)->required();
  hash->add_option("-o,--output", hash_out)->required();

  auto* user = app.add_subcommand("user", "Manage professor accounts");
  user->require_subcommand(1);
  std::string user_id;
  std::optional<std::string> password;
  std::string user_dir = "data";
  auto* add = user->add_subcommand("add", "Add or update a professor account");
  add->add_option("id", user_id)->required();
  add->add_option("--password", password, "Insecure: visible in the process list; for automation only");
  add->add_option("--data-dir", user_dir)->envname("QW_DATA_DIR");

  ServeOptions serve_options;
  std::string data_dir = serve_options.data_dir.string();
  std::string web_root = serve_options.web_root.string();
  auto* srv = app.add_subcommand("serve", "Run the test server");
  srv->add_option("--port", serve_options.port)->envname("QW_PORT");
  srv->add_option("--http-port", serve_options.http_port)->envname("QW_HTTP_PORT");
  srv->add_option("--data-dir", data_dir)->envname("QW_DATA_DIR");
  srv->add_option("--nonce", serve_options.nonce)->envname("QW_NONCE");
  srv->add_option("--web-root", web_root)->envname("QW_WEB_ROOT");
  srv->add_option("--host", serve_options.host);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kExitUsage;
  }

  if (*validate) return bank_validate(validate_file, out, err);
  if (*hash) return bank_hash(hash_in, hash_out, out, err);
  if (*add) {
    if (!password) password = read_password();
    if (!password) {
      err << "error: no password given\n";
      return kExitInvalid;
    }
    return user_add(user_id, *password, user_dir, out, err);
  }
  serve_options.data_dir = data_dir;
  serve_options.web_root = web_root;
  return serve(serve_options, out, err, wait_for_shutdown);
}

}  // namespace qw::admin
