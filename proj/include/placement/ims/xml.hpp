#pragma once

// Minimal element tree for the interchange formats. Parsing is backed by
// expat; writing is a small indenting serializer. Mixed content is not
// modelled: an element carries either child elements or text.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace placement::ims::xml {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;
  std::size_t line = 0;

  explicit Element(std::string n = {}) : name(std::move(n)) {}

  [[nodiscard]] const std::string* find_attribute(std::string_view key) const;
  Element& set(std::string key, std::string value);
  Element& add_child(Element child);
  Element& add_text_child(std::string child_name, std::string child_text);

  [[nodiscard]] std::vector<const Element*> children_named(std::string_view n) const;
  [[nodiscard]] const Element* first_child(std::string_view n) const;
};

/// Throws ParseError on malformed input.
[[nodiscard]] Element parse(std::string_view document);

[[nodiscard]] std::string write(const Element& root);

/// Shortest decimal that round-trips the double exactly, never fewer than
/// ten significant digits.
[[nodiscard]] std::string format_real(double value);

[[nodiscard]] std::optional<double> parse_real(std::string_view text);
[[nodiscard]] std::optional<long long> parse_integer(std::string_view text);

}  // namespace placement::ims::xml
