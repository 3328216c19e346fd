#include "orcha/csv.hpp"

#include <stdexcept>

namespace orcha::csv {

std::vector<Record> read(std::string_view text) {
  std::vector<Record> records;
  Record current;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  current.line = line;

  auto end_cell = [&] {
    current.cells.push_back(std::move(cell));
    cell.clear();
    cell_was_quoted = false;
  };
  auto end_record = [&] {
    end_cell();
    const bool blank = !record_has_content && current.cells.size() == 1 && current.cells[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = Record{};
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (cell.empty() && !cell_was_quoted) {
          in_quotes = true;
          cell_was_quoted = true;
          record_has_content = true;
        } else {
          cell += c;
        }
        break;
      case ',':
        record_has_content = true;
        end_cell();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        current.line = line;
        break;
      default:
        record_has_content = true;
        cell += c;
    }
  }
  if (in_quotes) {
    throw std::runtime_error("unterminated quoted cell starting before line " +
                             std::to_string(line));
  }
  if (record_has_content || !cell.empty()) end_record();
  return records;
}

std::string escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string write_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ',';
    out += escape(cells[i]);
  }
  out += '\n';
  return out;
}

}  // namespace orcha::csv
