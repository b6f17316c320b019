#pragma once

// Tree construction from recorded parser events, written independently of
// xml::TreeBuilder.

#include <string_view>
#include <vector>

#include "quizwright/xml.hpp"

namespace qw::testing {

inline std::vector<xml::XmlEvent> events_of(std::string_view input) {
  std::vector<xml::XmlEvent> out;
  xml::parse_events(input, [&](const xml::XmlEvent& e) { out.push_back(e); });
  return out;
}

namespace detail {

inline xml::Element build(const std::vector<xml::XmlEvent>& ev, std::size_t& i) {
  const auto& start = std::get<xml::StartElement>(ev[i++]);
  xml::Element e{start.name, start.attributes, {}};
  for (;;) {
    const xml::XmlEvent& cur = ev[i];
    if (std::holds_alternative<xml::EndElement>(cur)) {
      ++i;
      return e;
    }
    if (std::holds_alternative<xml::StartElement>(cur)) {
      e.children.emplace_back(build(ev, i));
    } else {
      if (const auto* c = std::get_if<xml::Characters>(&cur)) {
        if (!e.children.empty() && e.children.back().is_text()) {
          std::get<xml::Text>(e.children.back().value).content += c->text;
        } else {
          e.children.emplace_back(xml::Text{c->text});
        }
      }
      ++i;
    }
  }
}

}  // namespace detail

/// Recursive descent over the events; comments dropped, adjacent character
/// runs merged.
inline xml::XmlDocument oracle_tree(std::string_view input) {
  auto ev = events_of(input);
  std::size_t i = 1;
  while (!std::holds_alternative<xml::StartElement>(ev[i])) ++i;
  return xml::XmlDocument{detail::build(ev, i)};
}

}  // namespace qw::testing
