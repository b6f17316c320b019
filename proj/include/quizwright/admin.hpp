#pragma once

// Administration commands. Each returns the process exit code:
//   0 success, 1 invalid input, 2 unreadable file or port bind failure,
//   64 usage error.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

namespace qw::admin {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

int bank_validate(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

int bank_hash(const std::filesystem::path& in, const std::filesystem::path& out_path, std::ostream& out,
              std::ostream& err);

/// Inserts or replaces the user in <data_dir>/users.xml.
int user_add(const std::string& user_id, const std::string& password, const std::filesystem::path& data_dir,
             std::ostream& out, std::ostream& err);

struct ServeOptions {
  std::uint16_t port = 7401;
  std::uint16_t http_port = 7402;
  std::filesystem::path data_dir = "data";
  std::optional<std::uint64_t> nonce;
  std::filesystem::path web_root = "web/dist";
  std::string host = "0.0.0.0";
};

/// Loads the data directory, starts both listeners, prints one line per
/// port, then blocks in `wait_for_shutdown`.
int serve(const ServeOptions& options, std::ostream& out, std::ostream& err,
          const std::function<void()>& wait_for_shutdown);

/// Full command line. `read_password` is used by `user add` when no
/// --password is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::function<std::optional<std::string>()>& read_password,
        const std::function<void()>& wait_for_shutdown);

}  // namespace qw::admin
