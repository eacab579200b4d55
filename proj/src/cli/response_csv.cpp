#include "placement/cli/response_csv.hpp"

#include <sstream>

#include "placement/ims/xml.hpp"

namespace placement::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

ResponseFile parse_response_csv(std::string_view text) {
  ResponseFile out;
  std::size_t line_no = 0;
  bool seen_record = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line);
    if (!seen_record && !fields.empty() && fields[0] == "item_id") {
      seen_record = true;
      continue;
    }
    seen_record = true;
    if (fields.size() != 4) {
      throw CsvParseError(line_no, "expected 4 fields (item_id,a,b,u), got " +
                                       std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw CsvParseError(line_no, "empty item_id");

    const auto a = ims::xml::parse_real(fields[1]);
    const auto b = ims::xml::parse_real(fields[2]);
    const auto u = ims::xml::parse_integer(fields[3]);
    if (!a) throw CsvParseError(line_no, "a is not a number: '" + std::string(fields[1]) + "'");
    if (!b) throw CsvParseError(line_no, "b is not a number: '" + std::string(fields[2]) + "'");
    if (!u) throw CsvParseError(line_no, "u is not an integer: '" + std::string(fields[3]) + "'");
    if (*u != 0 && *u != 1) throw CsvParseError(line_no, "u must be 0 or 1");
    try {
      out.responses.add(irt::ItemParameters(*a, *b), static_cast<int>(*u));
    } catch (const irt::DomainError& e) {
      throw CsvParseError(line_no, e.what());
    }
    out.item_ids.emplace_back(fields[0]);
  }
  return out;
}

std::string to_response_csv(const ResponseFile& file) {
  std::ostringstream out;
  out << "item_id,a,b,u\n";
  const auto& r = file.responses;
  for (std::size_t i = 0; i < r.size(); ++i) {
    out << file.item_ids[i] << ',' << ims::xml::format_real(r.discriminations()[i]) << ','
        << ims::xml::format_real(r.difficulties()[i]) << ',' << static_cast<int>(r.scores()[i])
        << '\n';
  }
  return out.str();
}

}  // namespace placement::cli
