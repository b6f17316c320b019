#include "quizwright/xml.hpp"

#include <charconv>

namespace qw::xml {

namespace {

struct Step {
  std::string_view name;
  std::size_t index = 0;  // 1-based; 0 selects every match
};

std::vector<Step> parse_path(std::string_view path) {
  if (path.empty()) throw PathError("empty path");
  std::vector<Step> steps;
  std::size_t pos = 0;
  for (;;) {
    std::size_t slash = path.find('/', pos);
    std::string_view segment = path.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
    Step step;
    std::size_t bracket = segment.find('[');
    step.name = segment.substr(0, bracket);
    if (!is_name(step.name)) throw PathError("invalid path step '" + std::string(segment) + "'");
    if (bracket != std::string_view::npos) {
      if (segment.back() != ']') throw PathError("unterminated index in '" + std::string(segment) + "'");
      std::string_view digits = segment.substr(bracket + 1, segment.size() - bracket - 2);
      auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), step.index);
      if (digits.empty() || ec != std::errc{} || end != digits.data() + digits.size() || step.index == 0) {
        throw PathError("index must be a positive integer in '" + std::string(segment) + "'");
      }
    }
    steps.push_back(step);
    if (slash == std::string_view::npos) break;
    pos = slash + 1;
  }
  return steps;
}

}  // namespace

std::vector<const Element*> select_path(const XmlDocument& doc, std::string_view path) {
  auto steps = parse_path(path);
  std::vector<const Element*> current;
  const Step& first = steps.front();
  if (doc.root.name == first.name && first.index <= 1) current.push_back(&doc.root);

  for (std::size_t i = 1; i < steps.size() && !current.empty(); ++i) {
    std::vector<const Element*> next;
    for (const Element* parent : current) {
      auto matches = parent->child_elements(steps[i].name);
      if (steps[i].index == 0) {
        next.insert(next.end(), matches.begin(), matches.end());
      } else if (steps[i].index <= matches.size()) {
        next.push_back(matches[steps[i].index - 1]);
      }
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace qw::xml
