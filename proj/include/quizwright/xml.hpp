#pragma once

// Minimal XML processor: a streaming event parser, a tree built on top of
// it, a canonical serializer and a tiny path selector.
//
// Supported subset: elements, attributes, character data, comments, the XML
// declaration, the five predefined entities and numeric character
// references. DTDs, processing instructions, CDATA sections and namespaces
// are rejected. Input must be UTF-8.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qw::xml {

inline constexpr std::size_t kMaxDepth = 256;

struct Attribute {
  std::string name;
  std::string value;

  bool operator==(const Attribute&) const = default;
};

using Attributes = std::vector<Attribute>;

// ---------------------------------------------------------------------------
// Events

struct StartDocument {
  bool operator==(const StartDocument&) const = default;
};
struct EndDocument {
  bool operator==(const EndDocument&) const = default;
};
struct StartElement {
  std::string name;
  Attributes attributes;
  bool operator==(const StartElement&) const = default;
};
struct EndElement {
  std::string name;
  bool operator==(const EndElement&) const = default;
};
struct Characters {
  std::string text;
  bool operator==(const Characters&) const = default;
};
struct Comment {
  std::string text;
  bool operator==(const Comment&) const = default;
};

using XmlEvent = std::variant<StartDocument, EndDocument, StartElement, EndElement,
                              Characters, Comment>;

using EventSink = std::function<void(const XmlEvent&)>;

// ---------------------------------------------------------------------------
// Errors

enum class ParseErrorKind { Syntax, Nesting, DuplicateAttribute, BadEntity, Encoding, DepthLimit };

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, std::string message);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// Streams the events of `input` into `sink`. Throws ParseError at the first
/// well-formedness problem; nothing is delivered after that point.
void parse_events(std::string_view input, const EventSink& sink);

// ---------------------------------------------------------------------------
// Tree

struct XmlNode;

struct Element {
  std::string name;
  Attributes attributes;
  std::vector<XmlNode> children;

  const std::string* attribute(std::string_view attr) const;
  void set_attribute(std::string_view attr, std::string value);
  bool remove_attribute(std::string_view attr);

  /// Child elements in document order, optionally filtered by name.
  std::vector<const Element*> child_elements(std::string_view filter = {}) const;
  std::vector<Element*> child_elements(std::string_view filter = {});

  /// Concatenation of the direct text children.
  std::string text() const;

  bool operator==(const Element&) const;
};

struct Text {
  std::string content;
  bool operator==(const Text&) const = default;
};

struct XmlNode {
  std::variant<Element, Text> value;

  XmlNode(Element e) : value(std::move(e)) {}
  XmlNode(Text t) : value(std::move(t)) {}

  bool is_element() const noexcept { return std::holds_alternative<Element>(value); }
  bool is_text() const noexcept { return std::holds_alternative<Text>(value); }
  const Element& element() const { return std::get<Element>(value); }
  Element& element() { return std::get<Element>(value); }
  const Text& text() const { return std::get<Text>(value); }

  bool operator==(const XmlNode&) const = default;
};

struct XmlDocument {
  Element root;
  bool operator==(const XmlDocument&) const = default;
};

/// Incrementally assembles a document from an event stream. Comments are
/// dropped and consecutive character data is merged into one text node.
class TreeBuilder {
 public:
  void operator()(const XmlEvent& event);
  XmlDocument take();

 private:
  void append_text(const std::string& text);

  std::vector<Element> open_;
  std::optional<Element> root_;
};

XmlDocument parse_tree(std::string_view input);

/// Canonical form: declaration line, no indentation, `<x/>` for elements
/// without children.
std::string serialize(const XmlDocument& doc);

std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view value);

// ---------------------------------------------------------------------------
// Paths such as `quizbank/question[2]/text`. The first step names the root.

class PathError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<const Element*> select_path(const XmlDocument& doc, std::string_view path);

/// True when `name` matches the accepted element/attribute name grammar.
bool is_name(std::string_view name) noexcept;

}  // namespace qw::xml
