#include "quizwright/digest.hpp"

#include <algorithm>
#include <bit>

namespace qw::digest {

namespace {

// Per-step left-rotate amounts, four per round.
constexpr std::array<std::uint32_t, 64> kShift = {
    7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22,
    5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20,
    4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23,
    6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21};

// floor(abs(sin(i + 1)) * 2^32)
constexpr std::array<std::uint32_t, 64> kSine = {
    0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf, 0x4787c62a, 0xa8304613, 0xfd469501,
    0x698098d8, 0x8b44f7af, 0xffff5bb1, 0x895cd7be, 0x6b901122, 0xfd987193, 0xa679438e, 0x49b40821,
    0xf61e2562, 0xc040b340, 0x265e5a51, 0xe9b6c7aa, 0xd62f105d, 0x02441453, 0xd8a1e681, 0xe7d3fbc8,
    0x21e1cde6, 0xc33707d6, 0xf4d50d87, 0x455a14ed, 0xa9e3e905, 0xfcefa3f8, 0x676f02d9, 0x8d2a4c8a,
    0xfffa3942, 0x8771f681, 0x6d9d6122, 0xfde5380c, 0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70,
    0x289b7ec6, 0xeaa127fa, 0xd4ef3085, 0x04881d05, 0xd9d4d039, 0xe6db99e5, 0x1fa27cf8, 0xc4ac5665,
    0xf4292244, 0x432aff97, 0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92, 0xffeff47d, 0x85845dd1,
    0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1, 0xf7537e82, 0xbd3af235, 0x2ad7d2bb, 0xeb86d391};

struct State {
  std::uint32_t a = 0x67452301;
  std::uint32_t b = 0xefcdab89;
  std::uint32_t c = 0x98badcfe;
  std::uint32_t d = 0x10325476;
};

void compress(State& s, const std::uint8_t* block) {
  std::array<std::uint32_t, 16> m;
  for (std::size_t i = 0; i < 16; ++i) {
    m[i] = static_cast<std::uint32_t>(block[4 * i]) | static_cast<std::uint32_t>(block[4 * i + 1]) << 8 |
           static_cast<std::uint32_t>(block[4 * i + 2]) << 16 | static_cast<std::uint32_t>(block[4 * i + 3]) << 24;
  }
  std::uint32_t a = s.a, b = s.b, c = s.c, d = s.d;
  for (std::uint32_t i = 0; i < 64; ++i) {
    std::uint32_t f;
    std::uint32_t g;
    if (i < 16) {
      f = (b & c) | (~b & d);
      g = i;
    } else if (i < 32) {
      f = (d & b) | (~d & c);
      g = (5 * i + 1) % 16;
    } else if (i < 48) {
      f = b ^ c ^ d;
      g = (3 * i + 5) % 16;
    } else {
      f = c ^ (b | ~d);
      g = (7 * i) % 16;
    }
    std::uint32_t rotated = std::rotl(a + f + kSine[i] + m[g], static_cast<int>(kShift[i]));
    a = d;
    d = c;
    c = b;
    b = b + rotated;
  }
  s.a += a;
  s.b += b;
  s.c += c;
  s.d += d;
}

void put_le32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Digest128 md5(std::span<const std::uint8_t> message) {
  State state;
  const std::size_t full_blocks = message.size() / 64;
  for (std::size_t i = 0; i < full_blocks; ++i) compress(state, message.data() + 64 * i);

  // Tail: remaining bytes, 0x80, zero fill to 56 mod 64, 64-bit bit length.
  std::array<std::uint8_t, 128> tail{};
  const std::size_t rest = message.size() - 64 * full_blocks;
  std::copy_n(message.data() + 64 * full_blocks, rest, tail.begin());
  tail[rest] = 0x80;
  const std::size_t tail_len = rest < 56 ? 64 : 128;
  const std::uint64_t bit_len = static_cast<std::uint64_t>(message.size()) * 8;
  for (int i = 0; i < 8; ++i) tail[tail_len - 8 + i] = static_cast<std::uint8_t>(bit_len >> (8 * i));
  compress(state, tail.data());
  if (tail_len == 128) compress(state, tail.data() + 64);

  Digest128::Bytes out;
  put_le32(out.data(), state.a);
  put_le32(out.data() + 4, state.b);
  put_le32(out.data() + 8, state.c);
  put_le32(out.data() + 12, state.d);
  return Digest128(out);
}

Digest128 md5(std::string_view message) {
  return md5(std::span(reinterpret_cast<const std::uint8_t*>(message.data()), message.size()));
}

std::string Digest128::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (std::uint8_t b : bytes_) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0x0F];
  }
  return out;
}

Digest128 Digest128::from_hex(std::string_view hex) {
  if (hex.size() != 32) throw std::invalid_argument("digest hex must be 32 characters");
  Bytes bytes;
  for (std::size_t i = 0; i < 16; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("digest hex contains a non-hex character");
    bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return Digest128(bytes);
}

bool is_hex32(std::string_view text) noexcept {
  return text.size() == 32 &&
         std::all_of(text.begin(), text.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::string answer_digest(std::string_view question_id, const ChoiceSet& selected) {
  if (selected.empty()) throw std::invalid_argument("answer selection must not be empty");
  std::string canonical(question_id);
  canonical += ':';
  bool first = true;
  for (const auto& id : selected) {
    if (!first) canonical += ',';
    canonical += id;
    first = false;
  }
  return md5(canonical).to_hex();
}

}  // namespace qw::digest
