#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orcha/color.hpp"

namespace orcha {

/// Chart time in data units (years in most datasets). Real-valued.
using Time = double;

struct SizeKnot {
  Time t = 0.0;
  double size = 0.0;

  friend bool operator==(const SizeKnot&, const SizeKnot&) = default;
};

struct StreamDef {
  std::string id;
  Time t0 = 0.0;
  Time t1 = 0.0;
  std::string color;  // as authored: "#D73", "blue", or blank for palette
  std::vector<SizeKnot> sizes;
  std::optional<std::string> parent;

  friend bool operator==(const StreamDef&, const StreamDef&) = default;
};

enum class LinkStyle { ribbon, line, arrow };

struct LinkDef {
  std::string from;
  Time t0 = 0.0;
  std::string to;
  std::optional<Time> t1;
  bool merge = false;
  LinkStyle style = LinkStyle::ribbon;

  friend bool operator==(const LinkDef&, const LinkDef&) = default;
};

enum class LabelType { in, out, on };
enum class LabelShape { ellipse, rect };

struct LabelDef {
  std::string stream;
  Time t = 0.0;
  std::string text;
  LabelType type = LabelType::in;
  double size = 1.0;  // em
  LabelShape shape = LabelShape::ellipse;

  friend bool operator==(const LabelDef&, const LabelDef&) = default;
};

struct ChartSpec {
  std::vector<StreamDef> streams;
  std::vector<LinkDef> links;
  std::vector<LabelDef> labels;

  const StreamDef* find_stream(std::string_view id) const;
  std::optional<std::size_t> stream_index(std::string_view id) const;

  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

enum class Table { streams, links, labels };

std::string_view to_string(Table table);
std::string_view to_string(LabelType type);
std::string_view to_string(LinkStyle style);
std::string_view to_string(LabelShape shape);
std::optional<LabelType> parse_label_type(std::string_view token);
std::optional<Table> parse_table(std::string_view token);

/// One broken rule. `row` is the 1-based position of the offending entry in
/// its table (declaration order), matching the data row in the CSV file.
struct Violation {
  Table table = Table::streams;
  std::size_t row = 0;
  std::string message;
  std::string detail;

  std::string describe() const;
};

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally unreadable CSV. `line` is the physical line of the record
/// (the header is line 1).
class ParseError : public ChartError {
 public:
  ParseError(Table table, std::size_t line, const std::string& what);
  Table table() const { return table_; }
  std::size_t line() const { return line_; }

 private:
  Table table_;
  std::size_t line_;
};

class ValidationError : public ChartError {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Unknown extra columns are ignored; a note is appended to `warnings` if given.
std::vector<StreamDef> parse_streams(std::string_view csv_text,
                                     std::vector<std::string>* warnings = nullptr);
std::vector<LinkDef> parse_links(std::string_view csv_text,
                                 std::vector<std::string>* warnings = nullptr);
std::vector<LabelDef> parse_labels(std::string_view csv_text,
                                   std::vector<std::string>* warnings = nullptr);

ChartSpec parse_chart(std::string_view streams_csv, std::string_view links_csv,
                      std::string_view labels_csv,
                      std::vector<std::string>* warnings = nullptr);

/// Every violation in the spec, in table order. `step` is the discretization
/// used to resolve a link's default end time (t0 + step).
std::vector<Violation> validate(const ChartSpec& spec, Time step = 1.0);

struct SerializedChart {
  std::string streams_csv;
  std::string links_csv;
  std::string labels_csv;
};

SerializedChart serialize(const ChartSpec& spec);

std::string format_sizes(const std::vector<SizeKnot>& sizes);
std::vector<SizeKnot> parse_sizes(std::string_view cell);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Effective link end time: the explicit t1, else t0 + step.
inline Time link_end_time(const LinkDef& link, Time step) {
  return link.t1 ? *link.t1 : link.t0 + step;
}

/// Resolved fill color of a stream (authored color or palette fallback).
Rgb stream_color(const ChartSpec& spec, std::size_t stream_index);

}  // namespace orcha
