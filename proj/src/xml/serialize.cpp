#include "quizwright/xml.hpp"

namespace qw::xml {

namespace {

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
          break;
        }
        [[fallthrough]];
      default: out += c;
    }
  }
}

void write_element(std::string& out, const Element& e) {
  out += '<';
  out += e.name;
  for (const auto& a : e.attributes) {
    out += ' ';
    out += a.name;
    out += "=\"";
    escape_into(out, a.value, true);
    out += '"';
  }
  if (e.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& child : e.children) {
    if (child.is_element()) {
      write_element(out, child.element());
    } else {
      escape_into(out, child.text().content, false);
    }
  }
  out += "</";
  out += e.name;
  out += '>';
}

}  // namespace

std::string escape_text(std::string_view text) {
  std::string out;
  escape_into(out, text, false);
  return out;
}

std::string escape_attribute(std::string_view value) {
  std::string out;
  escape_into(out, value, true);
  return out;
}

std::string serialize(const XmlDocument& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_element(out, doc.root);
  return out;
}

}  // namespace qw::xml
