#pragma once

// A reduced XML schema language and its validator.
//
// Schema files look like:
//
//   <schema root="quizbank">
//     <element name="quizbank">
//       <attribute name="subject" type="string" required="true"/>
//       <children>
//         <element ref="question" min="1" max="unbounded"/>
//       </children>
//     </element>
//     ...
//   </schema>
//
// Each element declares its attributes and exactly one content model:
// <empty/>, <text type="..."/> or a flat ordered <children> sequence.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quizwright/xml.hpp"

namespace qw::schema {

enum class ValueType { String, Integer, Hex32, IdToken, Enumeration };

std::string_view to_string(ValueType type);

struct AttrDecl {
  std::string name;
  bool required = false;
  ValueType type = ValueType::String;
  std::vector<std::string> enumeration;  // only for ValueType::Enumeration
};

struct ChildRef {
  std::string name;
  unsigned min = 1;
  std::optional<unsigned> max = 1;  // nullopt means unbounded
};

struct EmptyContent {};
struct TextContent {
  ValueType type = ValueType::String;
};
struct ChildrenContent {
  std::vector<ChildRef> refs;
};

using ContentModel = std::variant<EmptyContent, TextContent, ChildrenContent>;

struct ElementDecl {
  std::string name;
  std::vector<AttrDecl> attributes;
  ContentModel content;

  const AttrDecl* find_attribute(std::string_view attr) const;
};

struct Schema {
  std::string root;
  std::map<std::string, ElementDecl, std::less<>> declarations;

  const ElementDecl* find(std::string_view element) const;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds a Schema from a parsed schema document. Throws SchemaError naming
/// the offending declaration.
Schema load_schema(const xml::XmlDocument& doc);

enum class Rule { MissingAttr, BadAttrType, UnknownAttr, UnknownElement, Cardinality, BadContent, BadRoot };

std::string_view to_string(Rule rule);

struct Violation {
  std::string path;  // resolvable with xml::select_path
  Rule rule;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// All violations found in one document-order walk; empty means valid.
std::vector<Violation> validate(const xml::XmlDocument& doc, const Schema& schema);

bool matches_type(ValueType type, const std::vector<std::string>& enumeration, std::string_view value);

/// One of the schemas compiled into the library: "quizbank", "testconfig",
/// "users" or "result". Loaded once; throws std::out_of_range for other names.
const Schema& builtin(std::string_view name);

/// Raw text of a compiled-in schema file.
std::string_view builtin_source(std::string_view name);

}  // namespace qw::schema
