#include "quizwright/xml.hpp"

#include <stdexcept>

namespace qw::xml {

const std::string* Element::attribute(std::string_view attr) const {
  for (const auto& a : attributes) {
    if (a.name == attr) return &a.value;
  }
  return nullptr;
}

void Element::set_attribute(std::string_view attr, std::string value) {
  for (auto& a : attributes) {
    if (a.name == attr) {
      a.value = std::move(value);
      return;
    }
  }
  attributes.push_back({std::string(attr), std::move(value)});
}

bool Element::remove_attribute(std::string_view attr) {
  return std::erase_if(attributes, [&](const Attribute& a) { return a.name == attr; }) > 0;
}

std::vector<const Element*> Element::child_elements(std::string_view filter) const {
  std::vector<const Element*> out;
  for (const auto& child : children) {
    if (child.is_element() && (filter.empty() || child.element().name == filter)) {
      out.push_back(&child.element());
    }
  }
  return out;
}

std::vector<Element*> Element::child_elements(std::string_view filter) {
  std::vector<Element*> out;
  for (auto& child : children) {
    if (child.is_element() && (filter.empty() || child.element().name == filter)) {
      out.push_back(&child.element());
    }
  }
  return out;
}

std::string Element::text() const {
  std::string out;
  for (const auto& child : children) {
    if (child.is_text()) out += child.text().content;
  }
  return out;
}

bool Element::operator==(const Element& other) const {
  return name == other.name && attributes == other.attributes && children == other.children;
}

void TreeBuilder::append_text(const std::string& text) {
  auto& children = open_.back().children;
  if (!children.empty() && children.back().is_text()) {
    std::get<Text>(children.back().value).content += text;
  } else {
    children.emplace_back(Text{text});
  }
}

void TreeBuilder::operator()(const XmlEvent& event) {
  std::visit(
      [this](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, StartElement>) {
          open_.push_back(Element{e.name, e.attributes, {}});
        } else if constexpr (std::is_same_v<T, EndElement>) {
          Element done = std::move(open_.back());
          open_.pop_back();
          if (open_.empty()) {
            root_ = std::move(done);
          } else {
            open_.back().children.emplace_back(std::move(done));
          }
        } else if constexpr (std::is_same_v<T, Characters>) {
          if (!open_.empty()) append_text(e.text);
        }
      },
      event);
}

XmlDocument TreeBuilder::take() {
  if (!root_) throw std::logic_error("TreeBuilder: no complete root element");
  XmlDocument doc{std::move(*root_)};
  root_.reset();
  return doc;
}

XmlDocument parse_tree(std::string_view input) {
  TreeBuilder builder;
  parse_events(input, [&builder](const XmlEvent& e) { builder(e); });
  return builder.take();
}

}  // namespace qw::xml
