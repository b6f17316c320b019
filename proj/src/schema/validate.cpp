#include "quizwright/schema.hpp"

#include <algorithm>

namespace qw::schema {

bool matches_type(ValueType type, const std::vector<std::string>& enumeration, std::string_view value) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  switch (type) {
    case ValueType::String:
      return true;
    case ValueType::Integer: {
      std::string_view digits = (!value.empty() && value.front() == '-') ? value.substr(1) : value;
      return !digits.empty() && std::all_of(digits.begin(), digits.end(), digit);
    }
    case ValueType::Hex32:
      return value.size() == 32 &&
             std::all_of(value.begin(), value.end(), [&](char c) { return digit(c) || (c >= 'a' && c <= 'f'); });
    case ValueType::IdToken:
      return !value.empty() && std::all_of(value.begin(), value.end(), [&](char c) {
        return digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '-';
      });
    case ValueType::Enumeration:
      return std::find(enumeration.begin(), enumeration.end(), value) != enumeration.end();
  }
  return false;
}

namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string describe(const std::optional<unsigned>& max) {
  return max ? std::to_string(*max) : "unbounded";
}

class Validator {
 public:
  explicit Validator(const Schema& schema) : schema_(schema) {}

  std::vector<Violation> run(const xml::XmlDocument& doc) {
    const std::string path = doc.root.name;
    if (doc.root.name != schema_.root) {
      report(path, Rule::BadRoot, "root element is <" + doc.root.name + ">, expected <" + schema_.root + ">");
    }
    if (const ElementDecl* decl = schema_.find(doc.root.name)) {
      element(doc.root, *decl, path);
    } else if (doc.root.name != schema_.root) {
      report(path, Rule::UnknownElement, "element <" + doc.root.name + "> is not declared");
    }
    return std::move(out_);
  }

 private:
  void report(const std::string& path, Rule rule, std::string message) {
    out_.push_back({path, rule, std::move(message)});
  }

  void attributes(const xml::Element& e, const ElementDecl& decl, const std::string& path) {
    for (const auto& attr : e.attributes) {
      const AttrDecl* ad = decl.find_attribute(attr.name);
      if (!ad) {
        report(path, Rule::UnknownAttr, "attribute '" + attr.name + "' is not allowed on <" + e.name + ">");
      } else if (!matches_type(ad->type, ad->enumeration, attr.value)) {
        report(path, Rule::BadAttrType,
               "attribute '" + attr.name + "' value '" + attr.value + "' is not a valid " + std::string(to_string(ad->type)));
      }
    }
    for (const auto& ad : decl.attributes) {
      if (ad.required && !e.attribute(ad.name)) {
        report(path, Rule::MissingAttr, "required attribute '" + ad.name + "' is missing");
      }
    }
  }

  void element(const xml::Element& e, const ElementDecl& decl, const std::string& path) {
    attributes(e, decl, path);

    // Child paths use per-name sibling indices so select_path resolves them.
    std::vector<std::pair<const xml::Element*, std::string>> kids;
    std::map<std::string, std::size_t, std::less<>> seen;
    bool has_text = false;
    for (const auto& child : e.children) {
      if (child.is_element()) {
        const auto& ce = child.element();
        kids.emplace_back(&ce, path + "/" + ce.name + "[" + std::to_string(++seen[ce.name]) + "]");
      } else if (!is_blank(child.text().content)) {
        has_text = true;
      }
    }

    std::visit(
        [&](const auto& model) {
          using T = std::decay_t<decltype(model)>;
          if constexpr (std::is_same_v<T, EmptyContent>) {
            if (!kids.empty() || has_text) report(path, Rule::BadContent, "<" + e.name + "> must be empty");
          } else if constexpr (std::is_same_v<T, TextContent>) {
            if (!kids.empty()) {
              report(path, Rule::BadContent, "<" + e.name + "> allows text only, found child elements");
            } else if (!matches_type(model.type, {}, e.text())) {
              report(path, Rule::BadContent,
                     "<" + e.name + "> text is not a valid " + std::string(to_string(model.type)));
            }
          } else {
            if (has_text) report(path, Rule::BadContent, "<" + e.name + "> allows no character data");
            sequence(e, model, path, kids);
          }
        },
        decl.content);
  }

  // Matches children against a flat ordered list of (name, min, max).
  void sequence(const xml::Element& e, const ChildrenContent& model, const std::string& path,
                const std::vector<std::pair<const xml::Element*, std::string>>& kids) {
    const auto& refs = model.refs;
    std::size_t idx = 0;
    unsigned count = 0;

    auto close_ref = [&](std::size_t i, unsigned n) {
      if (n < refs[i].min) {
        report(path, Rule::Cardinality,
               "<" + e.name + "> needs at least " + std::to_string(refs[i].min) + " <" + refs[i].name + ">, found " +
                   std::to_string(n));
      }
    };

    for (const auto& [child, child_path] : kids) {
      const ElementDecl* child_decl = schema_.find(child->name);
      std::size_t target = refs.size();
      for (std::size_t k = idx; k < refs.size(); ++k) {
        bool full = k == idx && refs[k].max && count >= *refs[k].max;
        if (refs[k].name == child->name && !full) {
          target = k;
          break;
        }
      }
      if (target < refs.size()) {
        if (target != idx) {
          close_ref(idx, count);
          for (std::size_t k = idx + 1; k < target; ++k) close_ref(k, 0);
          idx = target;
          count = 0;
        }
        ++count;
      } else if (!child_decl) {
        report(child_path, Rule::UnknownElement, "element <" + child->name + "> is not declared");
        continue;
      } else if (idx < refs.size() && refs[idx].name == child->name) {
        report(child_path, Rule::Cardinality,
               "<" + e.name + "> allows at most " + describe(refs[idx].max) + " <" + child->name + ">");
      } else {
        report(child_path, Rule::BadContent, "<" + child->name + "> is not allowed here in <" + e.name + ">");
      }
      if (child_decl) element(*child, *child_decl, child_path);
    }
    if (idx < refs.size()) {
      close_ref(idx, count);
      for (std::size_t k = idx + 1; k < refs.size(); ++k) close_ref(k, 0);
    }
  }

  const Schema& schema_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const xml::XmlDocument& doc, const Schema& schema) {
  return Validator(schema).run(doc);
}

}  // namespace qw::schema
