#include "placement/ims/xml.hpp"

#include <expat.h>

#include <charconv>
#include <cstdio>
#include <memory>
#include <system_error>

namespace placement::ims::xml {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("XML parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

const std::string* Element::find_attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

Element& Element::set(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
  return *this;
}

Element& Element::add_child(Element child) {
  children.push_back(std::move(child));
  return children.back();
}

Element& Element::add_text_child(std::string child_name, std::string child_text) {
  Element e(std::move(child_name));
  e.text = std::move(child_text);
  return add_child(std::move(e));
}

std::vector<const Element*> Element::children_named(std::string_view n) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == n) out.push_back(&c);
  }
  return out;
}

const Element* Element::first_child(std::string_view n) const {
  for (const auto& c : children) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

namespace {

struct Builder {
  XML_Parser parser = nullptr;
  std::vector<Element> stack;
  std::optional<Element> root;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* b = static_cast<Builder*>(data);
  Element e(name);
  e.line = XML_GetCurrentLineNumber(b->parser);
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    e.attributes.emplace_back(attrs[i], attrs[i + 1]);
  }
  b->stack.push_back(std::move(e));
}

void XMLCALL on_end(void* data, const XML_Char* /*name*/) {
  auto* b = static_cast<Builder*>(data);
  Element done = std::move(b->stack.back());
  b->stack.pop_back();
  done.text = std::string(trim(done.text));
  if (b->stack.empty()) {
    b->root = std::move(done);
  } else {
    b->stack.back().children.push_back(std::move(done));
  }
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(data);
  if (!b->stack.empty()) b->stack.back().text.append(s, static_cast<std::size_t>(len));
}

void escape_into(std::string& out, std::string_view text, bool attribute) {
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      case '\n':
        if (attribute) {
          out += "&#10;";
        } else {
          out += c;
        }
        break;
      case '\t':
        if (attribute) {
          out += "&#9;";
        } else {
          out += c;
        }
        break;
      case '\r':
        out += "&#13;";
        break;
      default:
        out += c;
    }
  }
}

void write_element(std::string& out, const Element& e, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += e.name;
  for (const auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape_into(out, v, true);
    out += '"';
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>\n";
    return;
  }
  out += '>';
  if (e.children.empty()) {
    escape_into(out, e.text, false);
  } else {
    out += '\n';
    for (const auto& c : e.children) write_element(out, c, depth + 1);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
  }
  out += "</";
  out += e.name;
  out += ">\n";
}

}  // namespace

Element parse(std::string_view document) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw std::bad_alloc();

  Builder builder;
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &on_start, &on_end);
  XML_SetCharacterDataHandler(parser.get(), &on_text);

  const auto status = XML_Parse(parser.get(), document.data(),
                                static_cast<int>(document.size()), XML_TRUE);
  if (status != XML_STATUS_OK) {
    throw ParseError(XML_ErrorString(XML_GetErrorCode(parser.get())),
                     XML_GetCurrentLineNumber(parser.get()),
                     XML_GetCurrentColumnNumber(parser.get()));
  }
  if (!builder.root) throw ParseError("no root element", 1, 0);
  return std::move(*builder.root);
}

std::string write(const Element& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_element(out, root, 0);
  return out;
}

std::string format_real(double value) {
  char buf[64];
  for (int precision = 10; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (auto back = parse_real(buf); back && *back == value) break;
  }
  return buf;
}

std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

}  // namespace placement::ims::xml
