#pragma once

// Response files for `estimate`: one `item_id,a,b,u` record per line.
// Blank lines and lines starting with '#' are skipped, as is a leading
// header line whose first field is literally `item_id`.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "placement/irt/model.hpp"

namespace placement::cli {

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ResponseFile {
  std::vector<std::string> item_ids;
  irt::ResponseVector responses;
};

[[nodiscard]] ResponseFile parse_response_csv(std::string_view text);

[[nodiscard]] std::string to_response_csv(const ResponseFile& file);

}  // namespace placement::cli
