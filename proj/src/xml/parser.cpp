#include "quizwright/xml.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

namespace qw::xml {

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::Nesting: return "Nesting";
    case ParseErrorKind::DuplicateAttribute: return "DuplicateAttribute";
    case ParseErrorKind::BadEntity: return "BadEntity";
    case ParseErrorKind::Encoding: return "Encoding";
    case ParseErrorKind::DepthLimit: return "DepthLimit";
  }
  return "Unknown";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, std::string message)
    : std::runtime_error(std::string(to_string(kind)) + " error at " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column),
      detail_(std::move(message)) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_name_start(char c) { return is_alpha(c) || c == '_'; }
bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '-' || c == '.'; }

bool is_xml_char(std::uint32_t cp) {
  return cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
         (cp >= 0xE000 && cp <= 0xFFFD) || (cp >= 0x10000 && cp <= 0x10FFFF);
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
    return lower(x) == lower(y);
  });
}

class Parser {
 public:
  Parser(std::string_view input, const EventSink& sink) : in_(input), sink_(sink) {}

  void run() {
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    check_encoding();
    if (starts_with("<?xml") && pos_ + 5 < in_.size() && is_space(in_[pos_ + 5])) declaration();
    sink_(StartDocument{});
    misc();
    if (at_end()) fail(ParseErrorKind::Syntax, "document has no root element");
    if (peek() != '<') fail(ParseErrorKind::Syntax, "character data outside the root element");
    element_tree();
    misc();
    if (!at_end()) {
      fail(ParseErrorKind::Syntax,
           peek() == '<' ? "more than one root element" : "character data after the root element");
    }
    sink_(EndDocument{});
  }

 private:
  [[noreturn]] void fail(ParseErrorKind kind, std::string message) { fail_at(pos_, kind, std::move(message)); }

  [[noreturn]] void fail_at(std::size_t offset, ParseErrorKind kind, std::string message) {
    offset = std::min(offset, in_.size());
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
      if (in_[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    throw ParseError(kind, line, offset - line_start + 1, std::move(message));
  }

  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s, std::string_view what) {
    if (!starts_with(s)) fail(ParseErrorKind::Syntax, "expected " + std::string(what));
    pos_ += s.size();
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) ++pos_;
  }

  // Rejects malformed UTF-8 and raw control characters before any event is
  // produced.
  void check_encoding() {
    std::size_t i = pos_;
    while (i < in_.size()) {
      auto b = static_cast<unsigned char>(in_[i]);
      if (b < 0x80) {
        if (b < 0x20 && b != '\t' && b != '\n' && b != '\r') {
          fail_at(i, ParseErrorKind::Encoding, "control character not allowed");
        }
        ++i;
        continue;
      }
      std::size_t len = 0;
      std::uint32_t cp = 0;
      if ((b & 0xE0) == 0xC0) {
        len = 2;
        cp = b & 0x1F;
      } else if ((b & 0xF0) == 0xE0) {
        len = 3;
        cp = b & 0x0F;
      } else if ((b & 0xF8) == 0xF0) {
        len = 4;
        cp = b & 0x07;
      } else {
        fail_at(i, ParseErrorKind::Encoding, "invalid UTF-8 lead byte");
      }
      if (i + len > in_.size()) fail_at(i, ParseErrorKind::Encoding, "truncated UTF-8 sequence");
      for (std::size_t k = 1; k < len; ++k) {
        auto c = static_cast<unsigned char>(in_[i + k]);
        if ((c & 0xC0) != 0x80) fail_at(i, ParseErrorKind::Encoding, "invalid UTF-8 continuation byte");
        cp = (cp << 6) | (c & 0x3F);
      }
      static constexpr std::uint32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
      if (cp < kMinForLength[len] || !is_xml_char(cp)) {
        fail_at(i, ParseErrorKind::Encoding, "invalid UTF-8 code point");
      }
      i += len;
    }
  }

  void declaration() {
    pos_ += 5;
    bool seen_version = false;
    for (;;) {
      skip_space();
      if (starts_with("?>")) {
        pos_ += 2;
        break;
      }
      if (at_end()) fail(ParseErrorKind::Syntax, "unterminated XML declaration");
      std::size_t attr_pos = pos_;
      std::string key = name();
      skip_space();
      expect("=", "'=' in XML declaration");
      skip_space();
      std::string value = quoted_raw();
      if (key == "version") {
        if (value.substr(0, 2) != "1.") fail_at(attr_pos, ParseErrorKind::Syntax, "unsupported XML version");
        seen_version = true;
      } else if (key == "encoding") {
        if (!iequals(value, "UTF-8") && !iequals(value, "UTF8")) {
          fail_at(attr_pos, ParseErrorKind::Encoding, "unsupported encoding '" + value + "'");
        }
      } else if (key != "standalone") {
        fail_at(attr_pos, ParseErrorKind::Syntax, "unknown XML declaration field '" + key + "'");
      }
    }
    if (!seen_version) fail(ParseErrorKind::Syntax, "XML declaration without version");
  }

  // Whitespace, comments; anything else stops the scan.
  void misc() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        comment();
      } else if (starts_with("<?")) {
        fail(ParseErrorKind::Syntax, "processing instructions are not supported");
      } else if (starts_with("<!")) {
        fail(ParseErrorKind::Syntax, "document type declarations are not supported");
      } else {
        return;
      }
    }
  }

  void comment() {
    std::size_t start = pos_;
    pos_ += 4;
    std::size_t end = in_.find("--", pos_);
    if (end == std::string_view::npos) fail_at(start, ParseErrorKind::Syntax, "unterminated comment");
    if (end + 2 >= in_.size() || in_[end + 2] != '>') {
      fail_at(end, ParseErrorKind::Syntax, "'--' not allowed inside a comment");
    }
    std::string text(in_.substr(pos_, end - pos_));
    pos_ = end + 3;
    sink_(Comment{std::move(text)});
  }

  std::string name() {
    if (at_end() || !is_name_start(peek())) fail(ParseErrorKind::Syntax, "expected a name");
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    return std::string(in_.substr(start, pos_ - start));
  }

  std::string quoted_raw() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail(ParseErrorKind::Syntax, "expected a quoted value");
    char quote = peek();
    std::size_t start = ++pos_;
    std::size_t end = in_.find(quote, pos_);
    if (end == std::string_view::npos) fail_at(start - 1, ParseErrorKind::Syntax, "unterminated quoted value");
    pos_ = end + 1;
    return std::string(in_.substr(start, end - start));
  }

  // Decodes one reference starting at '&' and appends it to `out`.
  void reference(std::string& out) {
    std::size_t start = pos_;
    ++pos_;
    std::size_t semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) {
      fail_at(start, ParseErrorKind::BadEntity, "unterminated entity reference");
    }
    std::string_view body = in_.substr(pos_, semi - pos_);
    pos_ = semi + 1;
    if (!body.empty() && body[0] == '#') {
      bool hex = body.size() > 1 && body[1] == 'x';
      std::string_view digits = body.substr(hex ? 2 : 1);
      if (digits.empty()) fail_at(start, ParseErrorKind::BadEntity, "empty character reference");
      std::uint32_t cp = 0;
      for (char c : digits) {
        std::uint32_t d;
        if (is_digit(c)) {
          d = static_cast<std::uint32_t>(c - '0');
        } else if (hex && c >= 'a' && c <= 'f') {
          d = static_cast<std::uint32_t>(c - 'a' + 10);
        } else if (hex && c >= 'A' && c <= 'F') {
          d = static_cast<std::uint32_t>(c - 'A' + 10);
        } else {
          fail_at(start, ParseErrorKind::BadEntity, "invalid digit in character reference");
        }
        cp = cp * (hex ? 16 : 10) + d;
        if (cp > 0x10FFFF) fail_at(start, ParseErrorKind::BadEntity, "character reference out of range");
      }
      if (!is_xml_char(cp)) fail_at(start, ParseErrorKind::BadEntity, "character reference to an invalid character");
      append_utf8(out, cp);
      return;
    }
    if (body == "lt") {
      out += '<';
    } else if (body == "gt") {
      out += '>';
    } else if (body == "amp") {
      out += '&';
    } else if (body == "quot") {
      out += '"';
    } else if (body == "apos") {
      out += '\'';
    } else {
      fail_at(start, ParseErrorKind::BadEntity, "unknown entity '&" + std::string(body) + ";'");
    }
  }

  std::string attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail(ParseErrorKind::Syntax, "expected a quoted attribute value");
    char quote = peek();
    std::size_t open = pos_++;
    std::string value;
    for (;;) {
      if (at_end()) fail_at(open, ParseErrorKind::Syntax, "unterminated attribute value");
      char c = peek();
      if (c == quote) {
        ++pos_;
        return value;
      }
      if (c == '<') fail(ParseErrorKind::Syntax, "'<' not allowed in attribute value");
      if (c == '&') {
        reference(value);
      } else {
        value += c;
        ++pos_;
      }
    }
  }

  // Parses `<name attrs...>` or `<name .../>`; returns true for the latter.
  bool start_tag(std::string& tag_name) {
    std::size_t tag_pos = pos_;
    ++pos_;
    tag_name = name();
    if (open_.size() + 1 >= kMaxDepth) {
      fail_at(tag_pos, ParseErrorKind::DepthLimit, "element nesting reaches " + std::to_string(kMaxDepth) + " levels");
    }
    Attributes attributes;
    for (;;) {
      bool had_space = !at_end() && is_space(peek());
      skip_space();
      if (at_end()) fail_at(tag_pos, ParseErrorKind::Syntax, "unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        sink_(StartElement{tag_name, std::move(attributes)});
        return true;
      }
      if (peek() == '>') {
        ++pos_;
        sink_(StartElement{tag_name, std::move(attributes)});
        return false;
      }
      if (!had_space) fail(ParseErrorKind::Syntax, "expected whitespace before attribute");
      std::size_t attr_pos = pos_;
      std::string attr_name = name();
      for (const auto& a : attributes) {
        if (a.name == attr_name) {
          fail_at(attr_pos, ParseErrorKind::DuplicateAttribute, "duplicate attribute '" + attr_name + "'");
        }
      }
      skip_space();
      expect("=", "'=' after attribute name");
      skip_space();
      attributes.push_back({std::move(attr_name), attribute_value()});
    }
  }

  void end_tag() {
    std::size_t tag_pos = pos_;
    pos_ += 2;
    std::string tag_name = name();
    skip_space();
    expect(">", "'>' to close end tag");
    if (tag_name != open_.back()) {
      fail_at(tag_pos, ParseErrorKind::Nesting,
              "end tag '" + tag_name + "' does not match open element '" + open_.back() + "'");
    }
    open_.pop_back();
    sink_(EndElement{std::move(tag_name)});
  }

  void element_tree() {
    std::string tag_name;
    if (start_tag(tag_name)) {
      sink_(EndElement{std::move(tag_name)});
      return;
    }
    open_.push_back(std::move(tag_name));
    std::string text;
    while (!open_.empty()) {
      if (at_end()) fail(ParseErrorKind::Nesting, "element '" + open_.back() + "' is never closed");
      if (peek() != '<') {
        char c = peek();
        if (c == '&') {
          reference(text);
        } else {
          std::size_t stop = in_.find_first_of("<&", pos_);
          if (stop == std::string_view::npos) stop = in_.size();
          text.append(in_.substr(pos_, stop - pos_));
          pos_ = stop;
        }
        continue;
      }
      if (!text.empty()) {
        sink_(Characters{std::move(text)});
        text.clear();
      }
      if (starts_with("</")) {
        end_tag();
      } else if (starts_with("<!--")) {
        comment();
      } else if (starts_with("<![CDATA[")) {
        fail(ParseErrorKind::Syntax, "CDATA sections are not supported");
      } else if (starts_with("<!") || starts_with("<?")) {
        fail(ParseErrorKind::Syntax, "unsupported markup declaration");
      } else if (start_tag(tag_name)) {
        sink_(EndElement{std::move(tag_name)});
      } else {
        open_.push_back(std::move(tag_name));
      }
    }
  }

  std::string_view in_;
  const EventSink& sink_;
  std::size_t pos_ = 0;
  std::vector<std::string> open_;
};

}  // namespace

bool is_name(std::string_view name) noexcept {
  if (name.empty() || !is_name_start(name.front())) return false;
  return std::all_of(name.begin() + 1, name.end(), is_name_char);
}

void parse_events(std::string_view input, const EventSink& sink) {
  Parser(input, sink).run();
}

}  // namespace qw::xml
