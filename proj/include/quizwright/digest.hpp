#pragma once

// MD5 (RFC 1321) and the helpers used to code quiz answer keys.
//
// MD5 is kept because the answer-key format depends on it; it is not a
// secure hash and the coded keys can be brute-forced over small choice sets.

#include <array>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qw::digest {

class Digest128 {
 public:
  using Bytes = std::array<std::uint8_t, 16>;

  constexpr Digest128() = default;
  constexpr explicit Digest128(const Bytes& bytes) : bytes_(bytes) {}

  const Bytes& bytes() const noexcept { return bytes_; }

  /// 32 lowercase hex characters, most significant nibble of byte 0 first.
  std::string to_hex() const;

  /// Accepts exactly 32 hex characters (either case). Throws
  /// std::invalid_argument otherwise.
  static Digest128 from_hex(std::string_view hex);

  bool operator==(const Digest128&) const = default;

 private:
  Bytes bytes_{};
};

Digest128 md5(std::span<const std::uint8_t> message);
Digest128 md5(std::string_view message);

inline std::string to_hex(const Digest128& d) { return d.to_hex(); }

/// True for exactly 32 lowercase hex characters.
bool is_hex32(std::string_view text) noexcept;

/// Choice-id sets order bytewise, which is the canonical key order.
using ChoiceSet = std::set<std::string>;

/// to_hex(md5(question_id + ":" + sorted ids joined by ",")).
/// Throws std::invalid_argument for an empty selection.
std::string answer_digest(std::string_view question_id, const ChoiceSet& selected);

}  // namespace qw::digest
