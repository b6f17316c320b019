#include "quizwright/schema.hpp"

#include <charconv>
#include <set>

namespace qw::schema {

namespace detail {
const std::map<std::string_view, std::string_view>& embedded_schemas();
}

std::string_view to_string(ValueType type) {
  switch (type) {
    case ValueType::String: return "string";
    case ValueType::Integer: return "integer";
    case ValueType::Hex32: return "hex32";
    case ValueType::IdToken: return "id-token";
    case ValueType::Enumeration: return "enum";
  }
  return "unknown";
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::MissingAttr: return "MissingAttr";
    case Rule::BadAttrType: return "BadAttrType";
    case Rule::UnknownAttr: return "UnknownAttr";
    case Rule::UnknownElement: return "UnknownElement";
    case Rule::Cardinality: return "Cardinality";
    case Rule::BadContent: return "BadContent";
    case Rule::BadRoot: return "BadRoot";
  }
  return "Unknown";
}

const AttrDecl* ElementDecl::find_attribute(std::string_view attr) const {
  for (const auto& a : attributes) {
    if (a.name == attr) return &a;
  }
  return nullptr;
}

const ElementDecl* Schema::find(std::string_view element) const {
  auto it = declarations.find(element);
  return it == declarations.end() ? nullptr : &it->second;
}

namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Rejects stray character data in schema markup.
std::vector<const xml::Element*> structural_children(const xml::Element& e, std::string_view context) {
  for (const auto& child : e.children) {
    if (child.is_text() && !is_blank(child.text().content)) {
      throw SchemaError(std::string(context) + ": unexpected text in schema markup");
    }
  }
  return e.child_elements();
}

std::string required_attr(const xml::Element& e, std::string_view attr, std::string_view context) {
  const std::string* value = e.attribute(attr);
  if (!value) throw SchemaError(std::string(context) + ": <" + e.name + "> lacks attribute '" + std::string(attr) + "'");
  return *value;
}

unsigned parse_count(const std::string& text, std::string_view context) {
  unsigned value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw SchemaError(std::string(context) + ": '" + text + "' is not a non-negative integer");
  }
  return value;
}

ValueType parse_type(const std::string& text, std::string_view context) {
  if (text == "string") return ValueType::String;
  if (text == "integer") return ValueType::Integer;
  if (text == "hex32") return ValueType::Hex32;
  if (text == "id-token") return ValueType::IdToken;
  if (text == "enum") return ValueType::Enumeration;
  throw SchemaError(std::string(context) + ": unknown value type '" + text + "'");
}

AttrDecl parse_attribute(const xml::Element& e, const std::string& owner) {
  AttrDecl decl;
  decl.name = required_attr(e, "name", "element '" + owner + "'");
  std::string context = "attribute '" + owner + "@" + decl.name + "'";
  if (!xml::is_name(decl.name)) throw SchemaError(context + ": invalid attribute name");
  decl.type = parse_type(required_attr(e, "type", context), context);
  if (const std::string* req = e.attribute("required")) {
    if (*req != "true" && *req != "false") throw SchemaError(context + ": required must be true or false");
    decl.required = *req == "true";
  }
  std::set<std::string> seen;
  for (const xml::Element* child : structural_children(e, context)) {
    if (child->name != "enumeration" || decl.type != ValueType::Enumeration) {
      throw SchemaError(context + ": unexpected <" + child->name + ">");
    }
    std::string value = required_attr(*child, "value", context);
    if (!seen.insert(value).second) throw SchemaError(context + ": duplicate enumeration value '" + value + "'");
    decl.enumeration.push_back(std::move(value));
  }
  if (decl.type == ValueType::Enumeration && decl.enumeration.empty()) {
    throw SchemaError(context + ": enumeration needs at least one value");
  }
  return decl;
}

ChildRef parse_child_ref(const xml::Element& e, std::string_view context) {
  if (e.name != "element") throw SchemaError(std::string(context) + ": unexpected <" + e.name + "> in <children>");
  ChildRef ref;
  ref.name = required_attr(e, "ref", context);
  std::string ref_context = std::string(context) + " child '" + ref.name + "'";
  if (const std::string* min = e.attribute("min")) ref.min = parse_count(*min, ref_context);
  if (const std::string* max = e.attribute("max")) {
    if (*max == "unbounded") {
      ref.max.reset();
    } else {
      ref.max = parse_count(*max, ref_context);
      if (*ref.max == 0) throw SchemaError(ref_context + ": max must be positive");
    }
  }
  if (ref.max && ref.min > *ref.max) throw SchemaError(ref_context + ": min exceeds max");
  return ref;
}

ElementDecl parse_element(const xml::Element& e) {
  ElementDecl decl;
  decl.name = required_attr(e, "name", "schema");
  std::string context = "element '" + decl.name + "'";
  if (!xml::is_name(decl.name)) throw SchemaError(context + ": invalid element name");
  std::optional<ContentModel> content;
  for (const xml::Element* child : structural_children(e, context)) {
    if (child->name == "attribute") {
      AttrDecl attr = parse_attribute(*child, decl.name);
      if (decl.find_attribute(attr.name)) throw SchemaError(context + ": attribute '" + attr.name + "' declared twice");
      decl.attributes.push_back(std::move(attr));
      continue;
    }
    if (child->name != "empty" && child->name != "text" && child->name != "children") {
      throw SchemaError(context + ": unexpected <" + child->name + ">");
    }
    if (content) throw SchemaError(context + ": more than one content model");
    if (child->name == "empty") {
      content = EmptyContent{};
    } else if (child->name == "text") {
      TextContent text;
      if (const std::string* type = child->attribute("type")) text.type = parse_type(*type, context);
      if (text.type == ValueType::Enumeration) throw SchemaError(context + ": text content cannot be an enumeration");
      content = text;
    } else {
      ChildrenContent children;
      for (const xml::Element* ref : structural_children(*child, context)) {
        children.refs.push_back(parse_child_ref(*ref, context));
      }
      content = std::move(children);
    }
  }
  if (!content) throw SchemaError(context + ": missing content model (<empty/>, <text/> or <children>)");
  decl.content = std::move(*content);
  return decl;
}

}  // namespace

Schema load_schema(const xml::XmlDocument& doc) {
  if (doc.root.name != "schema") throw SchemaError("schema document root must be <schema>");
  Schema schema;
  schema.root = required_attr(doc.root, "root", "schema");
  for (const xml::Element* child : structural_children(doc.root, "schema")) {
    if (child->name != "element") throw SchemaError("schema: unexpected <" + child->name + ">");
    ElementDecl decl = parse_element(*child);
    std::string name = decl.name;
    if (!schema.declarations.emplace(name, std::move(decl)).second) {
      throw SchemaError("element '" + name + "' declared twice");
    }
  }
  if (!schema.find(schema.root)) throw SchemaError("root element '" + schema.root + "' is not declared");
  for (const auto& [name, decl] : schema.declarations) {
    if (const auto* children = std::get_if<ChildrenContent>(&decl.content)) {
      for (const auto& ref : children->refs) {
        if (!schema.find(ref.name)) {
          throw SchemaError("element '" + name + "' references undeclared element '" + ref.name + "'");
        }
      }
    }
  }
  return schema;
}

std::string_view builtin_source(std::string_view name) {
  const auto& all = detail::embedded_schemas();
  auto it = all.find(name);
  if (it == all.end()) throw std::out_of_range("no built-in schema named '" + std::string(name) + "'");
  return it->second;
}

const Schema& builtin(std::string_view name) {
  static const std::map<std::string, Schema, std::less<>> loaded = [] {
    std::map<std::string, Schema, std::less<>> out;
    for (const auto& [key, text] : detail::embedded_schemas()) {
      out.emplace(std::string(key), load_schema(xml::parse_tree(text)));
    }
    return out;
  }();
  auto it = loaded.find(name);
  if (it == loaded.end()) throw std::out_of_range("no built-in schema named '" + std::string(name) + "'");
  return it->second;
}

}  // namespace qw::schema
