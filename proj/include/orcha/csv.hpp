#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace orcha::csv {

/// One parsed record plus the 1-based physical line it started on.
struct Record {
  std::vector<std::string> cells;
  std::size_t line = 0;
};

/// RFC 4180 reader: comma separator, double-quote escaping, CRLF or LF line
/// endings. Blank lines are skipped. Throws std::runtime_error on an
/// unterminated quoted cell.
std::vector<Record> read(std::string_view text);

/// Quotes a cell only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view cell);

std::string write_row(const std::vector<std::string>& cells);

}  // namespace orcha::csv
