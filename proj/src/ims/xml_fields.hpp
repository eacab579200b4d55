#pragma once

// Attribute accessors shared by the three format parsers.

#include <optional>
#include <string>
#include <string_view>

#include "placement/ims/types.hpp"
#include "placement/ims/xml.hpp"

namespace placement::ims::detail {

inline const xml::Element& expect_root(const xml::Element& root, std::string_view name) {
  if (root.name != name) {
    throw ValidationError("<" + root.name + ">", "root",
                          "expected root element <" + std::string(name) + ">");
  }
  return root;
}

inline std::string required(const xml::Element& e, std::string_view key,
                            const std::string& subject) {
  const std::string* v = e.find_attribute(key);
  if (v == nullptr) {
    throw ValidationError(subject, std::string(key),
                          "missing attribute on <" + e.name + "> (line " +
                              std::to_string(e.line) + ")");
  }
  return *v;
}

inline std::string optional_attr(const xml::Element& e, std::string_view key) {
  const std::string* v = e.find_attribute(key);
  return v == nullptr ? std::string{} : *v;
}

inline double required_real(const xml::Element& e, std::string_view key,
                            const std::string& subject) {
  const auto text = required(e, key, subject);
  const auto v = xml::parse_real(text);
  if (!v) throw ValidationError(subject, std::string(key), "not a number: '" + text + "'");
  return *v;
}

inline int required_int(const xml::Element& e, std::string_view key, const std::string& subject) {
  const auto text = required(e, key, subject);
  const auto v = xml::parse_integer(text);
  if (!v || *v < -2147483647LL || *v > 2147483647LL) {
    throw ValidationError(subject, std::string(key), "not an integer: '" + text + "'");
  }
  return static_cast<int>(*v);
}

template <typename Parser>
auto required_enum(const xml::Element& e, std::string_view key, const std::string& subject,
                   Parser parser) {
  const auto text = required(e, key, subject);
  const auto v = parser(text);
  if (!v) throw ValidationError(subject, std::string(key), "unknown value '" + text + "'");
  return *v;
}

inline std::string child_text(const xml::Element& e, std::string_view name) {
  const xml::Element* c = e.first_child(name);
  return c == nullptr ? std::string{} : c->text;
}

}  // namespace placement::ims::detail
