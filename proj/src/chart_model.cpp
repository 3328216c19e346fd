#include "orcha/chart_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "orcha/csv.hpp"

namespace orcha {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> to_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Maps the header row onto the columns a table understands.
class Columns {
 public:
  Columns(Table table, const csv::Record& header, std::initializer_list<std::string_view> required,
          std::initializer_list<std::string_view> optional, std::vector<std::string>* warnings)
      : table_(table), width_(header.cells.size()) {
    for (std::size_t i = 0; i < header.cells.size(); ++i) {
      const std::string name = lower(trim(header.cells[i]));
      const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                         std::find(optional.begin(), optional.end(), name) != optional.end();
      if (!known) {
        if (warnings) {
          warnings->push_back(std::string(to_string(table)) + ".csv: ignoring unknown column '" +
                              header.cells[i] + "'");
        }
        continue;
      }
      if (index_.count(name)) {
        throw ParseError(table, header.line, "duplicate column '" + name + "'");
      }
      index_[name] = i;
    }
    for (auto name : required) {
      if (!index_.count(std::string(name))) {
        throw ParseError(table, header.line, "missing required column '" + std::string(name) + "'");
      }
    }
  }

  void check_arity(const csv::Record& row) const {
    if (row.cells.size() != width_) {
      throw ParseError(table_, row.line,
                       "expected " + std::to_string(width_) + " cells, got " +
                           std::to_string(row.cells.size()));
    }
  }

  std::string_view cell(const csv::Record& row, std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return {};
    return row.cells[it->second];
  }

  double number(const csv::Record& row, std::string_view name) const {
    const auto value = to_number(cell(row, name));
    if (!value) {
      throw ParseError(table_, row.line,
                       "column '" + std::string(name) + "' is not a number: '" +
                           std::string(cell(row, name)) + "'");
    }
    return *value;
  }

  std::optional<double> optional_number(const csv::Record& row, std::string_view name) const {
    if (trim(cell(row, name)).empty()) return std::nullopt;
    return number(row, name);
  }

 private:
  Table table_;
  std::size_t width_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Splits CSV text into header + data rows; an empty document has no header.
std::pair<std::optional<csv::Record>, std::vector<csv::Record>> split(Table table,
                                                                      std::string_view text) {
  std::vector<csv::Record> records;
  try {
    records = csv::read(text);
  } catch (const std::runtime_error& e) {
    throw ParseError(table, 0, e.what());
  }
  if (records.empty()) return {std::nullopt, {}};
  csv::Record header = std::move(records.front());
  records.erase(records.begin());
  return {std::move(header), std::move(records)};
}

bool contains(Time lo, Time hi, Time t) { return lo <= t && t <= hi; }

std::string interval_text(const StreamDef& s) {
  return "stream " + s.id + " spans " + format_number(s.t0) + ".." + format_number(s.t1);
}

}  // namespace

std::string_view to_string(Table table) {
  switch (table) {
    case Table::streams: return "streams";
    case Table::links: return "links";
    case Table::labels: return "labels";
  }
  return "?";
}

std::string_view to_string(LabelType type) {
  switch (type) {
    case LabelType::in: return "in";
    case LabelType::out: return "out";
    case LabelType::on: return "on";
  }
  return "?";
}

std::string_view to_string(LinkStyle style) {
  switch (style) {
    case LinkStyle::ribbon: return "ribbon";
    case LinkStyle::line: return "line";
    case LinkStyle::arrow: return "arrow";
  }
  return "?";
}

std::string_view to_string(LabelShape shape) {
  return shape == LabelShape::rect ? "rect" : "ellipse";
}

std::optional<LabelType> parse_label_type(std::string_view token) {
  const std::string t = lower(trim(token));
  if (t == "in") return LabelType::in;
  if (t == "out") return LabelType::out;
  if (t == "on") return LabelType::on;
  return std::nullopt;
}

std::optional<Table> parse_table(std::string_view token) {
  const std::string t = lower(trim(token));
  if (t == "streams") return Table::streams;
  if (t == "links") return Table::links;
  if (t == "labels") return Table::labels;
  return std::nullopt;
}

std::string Violation::describe() const {
  std::string out = std::string(to_string(table)) + " row " + std::to_string(row) + ": " + message;
  if (!detail.empty()) out += " (" + detail + ")";
  return out;
}

ParseError::ParseError(Table table, std::size_t line, const std::string& what)
    : ChartError(std::string(to_string(table)) + ".csv line " + std::to_string(line) + ": " + what),
      table_(table),
      line_(line) {}

namespace {
std::string join_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.describe();
  }
  return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : ChartError(join_violations(violations)), violations_(std::move(violations)) {}

const StreamDef* ChartSpec::find_stream(std::string_view id) const {
  for (const auto& s : streams) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::optional<std::size_t> ChartSpec::stream_index(std::string_view id) const {
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i].id == id) return i;
  }
  return std::nullopt;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<SizeKnot> parse_sizes(std::string_view cell) {
  std::vector<SizeKnot> out;
  cell = trim(cell);
  if (cell.empty()) return out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    const std::size_t end = std::min(cell.find(';', start), cell.size());
    const std::string_view pair = trim(cell.substr(start, end - start));
    const std::size_t slash = pair.find('/');
    if (slash == std::string_view::npos) {
      throw std::invalid_argument("size entry '" + std::string(pair) + "' is not t/size");
    }
    const auto t = to_number(pair.substr(0, slash));
    const auto size = to_number(pair.substr(slash + 1));
    if (!t || !size) {
      throw std::invalid_argument("size entry '" + std::string(pair) + "' is not numeric");
    }
    out.push_back({*t, *size});
    start = end + 1;
  }
  return out;
}

std::string format_sizes(const std::vector<SizeKnot>& sizes) {
  std::string out;
  for (const auto& knot : sizes) {
    if (!out.empty()) out += ';';
    out += format_number(knot.t) + "/" + format_number(knot.size);
  }
  return out;
}

std::vector<StreamDef> parse_streams(std::string_view csv_text,
                                     std::vector<std::string>* warnings) {
  auto [header, rows] = split(Table::streams, csv_text);
  std::vector<StreamDef> out;
  if (!header) return out;
  const Columns cols(Table::streams, *header, {"id", "t0", "t1"}, {"color", "size", "parent"},
                     warnings);
  std::vector<Violation> duplicates;
  std::set<std::string, std::less<>> seen;
  for (const auto& row : rows) {
    cols.check_arity(row);
    StreamDef s;
    s.id = std::string(trim(cols.cell(row, "id")));
    s.t0 = cols.number(row, "t0");
    s.t1 = cols.number(row, "t1");
    s.color = std::string(trim(cols.cell(row, "color")));
    try {
      s.sizes = parse_sizes(cols.cell(row, "size"));
    } catch (const std::invalid_argument& e) {
      throw ParseError(Table::streams, row.line, e.what());
    }
    const auto parent = trim(cols.cell(row, "parent"));
    if (!parent.empty()) s.parent = std::string(parent);
    if (!seen.insert(s.id).second) {
      duplicates.push_back({Table::streams, out.size() + 1, "duplicate stream id", "id " + s.id});
    }
    out.push_back(std::move(s));
  }
  if (!duplicates.empty()) throw ValidationError(std::move(duplicates));
  return out;
}

std::vector<LinkDef> parse_links(std::string_view csv_text, std::vector<std::string>* warnings) {
  auto [header, rows] = split(Table::links, csv_text);
  std::vector<LinkDef> out;
  if (!header) return out;
  const Columns cols(Table::links, *header, {"from", "t0", "to"}, {"t1", "merge", "style"},
                     warnings);
  for (const auto& row : rows) {
    cols.check_arity(row);
    LinkDef link;
    link.from = std::string(trim(cols.cell(row, "from")));
    link.t0 = cols.number(row, "t0");
    link.to = std::string(trim(cols.cell(row, "to")));
    link.t1 = cols.optional_number(row, "t1");
    const std::string merge = lower(trim(cols.cell(row, "merge")));
    if (merge == "true" || merge == "1" || merge == "yes") {
      link.merge = true;
    } else if (!merge.empty() && merge != "false" && merge != "0" && merge != "no") {
      throw ParseError(Table::links, row.line, "merge must be true or false, got '" + merge + "'");
    }
    const std::string style = lower(trim(cols.cell(row, "style")));
    if (style == "line") {
      link.style = LinkStyle::line;
    } else if (style == "arrow") {
      link.style = LinkStyle::arrow;
    } else if (!style.empty() && style != "ribbon") {
      throw ParseError(Table::links, row.line, "unknown link style '" + style + "'");
    }
    out.push_back(std::move(link));
  }
  return out;
}

std::vector<LabelDef> parse_labels(std::string_view csv_text,
                                   std::vector<std::string>* warnings) {
  auto [header, rows] = split(Table::labels, csv_text);
  std::vector<LabelDef> out;
  if (!header) return out;
  const Columns cols(Table::labels, *header, {"stream", "t", "text", "type"}, {"size", "shape"},
                     warnings);
  std::vector<Violation> bad_types;
  for (const auto& row : rows) {
    cols.check_arity(row);
    LabelDef label;
    label.stream = std::string(trim(cols.cell(row, "stream")));
    label.t = cols.number(row, "t");
    label.text = std::string(cols.cell(row, "text"));
    const auto type_cell = cols.cell(row, "type");
    if (const auto type = parse_label_type(type_cell)) {
      label.type = *type;
    } else {
      bad_types.push_back({Table::labels, out.size() + 1, "unknown label type",
                           "'" + std::string(type_cell) + "', expected in, out or on"});
    }
    if (const auto size = cols.optional_number(row, "size")) label.size = *size;
    const std::string shape = lower(trim(cols.cell(row, "shape")));
    if (shape == "rect" || shape == "rectangle") {
      label.shape = LabelShape::rect;
    } else if (!shape.empty() && shape != "ellipse") {
      throw ParseError(Table::labels, row.line, "unknown label shape '" + shape + "'");
    }
    out.push_back(std::move(label));
  }
  if (!bad_types.empty()) throw ValidationError(std::move(bad_types));
  return out;
}

ChartSpec parse_chart(std::string_view streams_csv, std::string_view links_csv,
                      std::string_view labels_csv, std::vector<std::string>* warnings) {
  ChartSpec spec;
  spec.streams = parse_streams(streams_csv, warnings);
  spec.links = parse_links(links_csv, warnings);
  spec.labels = parse_labels(labels_csv, warnings);
  return spec;
}

std::vector<Violation> validate(const ChartSpec& spec, Time step) {
  std::vector<Violation> out;
  auto report = [&out](Table table, std::size_t index, std::string message, std::string detail) {
    out.push_back({table, index + 1, std::move(message), std::move(detail)});
  };

  std::map<std::string, std::size_t, std::less<>> ids;
  for (std::size_t i = 0; i < spec.streams.size(); ++i) {
    const auto& s = spec.streams[i];
    if (s.id.empty()) report(Table::streams, i, "empty stream id", "");
    if (!ids.emplace(s.id, i).second) report(Table::streams, i, "duplicate stream id", "id " + s.id);
  }

  for (std::size_t i = 0; i < spec.streams.size(); ++i) {
    const auto& s = spec.streams[i];
    if (!std::isfinite(s.t0) || !std::isfinite(s.t1)) {
      report(Table::streams, i, "non-finite time", "stream " + s.id);
    }
    if (s.t0 > s.t1) {
      report(Table::streams, i, "stream starts after it ends",
             "t0=" + format_number(s.t0) + " > t1=" + format_number(s.t1));
    }
    if (!s.color.empty() && !parse_color(s.color)) {
      report(Table::streams, i, "unknown color", "'" + s.color + "'");
    }
    for (std::size_t k = 0; k < s.sizes.size(); ++k) {
      const auto& knot = s.sizes[k];
      if (!contains(s.t0, s.t1, knot.t)) {
        report(Table::streams, i, "size time outside stream interval",
               "t=" + format_number(knot.t) + ", " + interval_text(s));
      }
      if (!(knot.size > 0.0)) {
        report(Table::streams, i, "size must be positive", "size=" + format_number(knot.size));
      }
      if (k > 0 && !(knot.t > s.sizes[k - 1].t)) {
        report(Table::streams, i, "non-monotone sizes",
               "t=" + format_number(knot.t) + " does not follow t=" +
                   format_number(s.sizes[k - 1].t));
      }
    }
    if (!s.parent) continue;
    const auto parent = ids.find(*s.parent);
    if (parent == ids.end()) {
      report(Table::streams, i, "unknown parent stream", "parent " + *s.parent);
      continue;
    }
    // Walk the parent chain; revisiting this stream means a cycle.
    bool cycle = false;
    std::set<std::size_t> visited{i};
    for (auto cur = parent; cur != ids.end();) {
      if (!visited.insert(cur->second).second) {
        cycle = cur->second == i;
        break;
      }
      const auto& p = spec.streams[cur->second];
      if (!p.parent) break;
      cur = ids.find(*p.parent);
    }
    if (cycle) {
      report(Table::streams, i, "parent cycle", "stream " + s.id);
      continue;
    }
    const auto& p = spec.streams[parent->second];
    if (!(p.t0 <= s.t0 && s.t1 <= p.t1)) {
      report(Table::streams, i, "parent interval does not contain child interval",
             interval_text(s) + ", " + interval_text(p));
    }
  }

  for (std::size_t i = 0; i < spec.links.size(); ++i) {
    const auto& link = spec.links[i];
    const StreamDef* from = spec.find_stream(link.from);
    const StreamDef* to = spec.find_stream(link.to);
    if (!from) report(Table::links, i, "unknown source stream", "from " + link.from);
    if (!to) report(Table::links, i, "unknown target stream", "to " + link.to);
    if (link.from == link.to) report(Table::links, i, "link connects a stream to itself", link.from);
    const Time end = link_end_time(link, step);
    if (!(end > link.t0)) {
      report(Table::links, i, "link must advance in time",
             "t0=" + format_number(link.t0) + ", t1=" + format_number(end));
    }
    if (from && !contains(from->t0, from->t1, link.t0)) {
      report(Table::links, i, "link start outside source interval",
             "t0=" + format_number(link.t0) + ", " + interval_text(*from));
    }
    if (to && !contains(to->t0, to->t1, end)) {
      report(Table::links, i, "link end outside target interval",
             "t1=" + format_number(end) + ", " + interval_text(*to));
    }
  }

  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    const auto& label = spec.labels[i];
    const StreamDef* s = spec.find_stream(label.stream);
    if (!s) {
      report(Table::labels, i, "unknown label stream", "stream " + label.stream);
    } else if (!contains(s->t0, s->t1, label.t)) {
      report(Table::labels, i, "label time outside stream interval",
             "t=" + format_number(label.t) + ", " + interval_text(*s));
    }
    if (!(label.size > 0.0)) {
      report(Table::labels, i, "label size must be positive", "size=" + format_number(label.size));
    }
  }
  return out;
}

SerializedChart serialize(const ChartSpec& spec) {
  SerializedChart out;
  out.streams_csv = csv::write_row({"id", "t0", "t1", "color", "size", "parent"});
  for (const auto& s : spec.streams) {
    out.streams_csv += csv::write_row({s.id, format_number(s.t0), format_number(s.t1), s.color,
                                       format_sizes(s.sizes), s.parent.value_or("")});
  }

  const bool styled = std::any_of(spec.links.begin(), spec.links.end(),
                                  [](const LinkDef& l) { return l.style != LinkStyle::ribbon; });
  std::vector<std::string> link_header{"from", "t0", "to", "t1", "merge"};
  if (styled) link_header.emplace_back("style");
  out.links_csv = csv::write_row(link_header);
  for (const auto& l : spec.links) {
    std::vector<std::string> row{l.from, format_number(l.t0), l.to,
                                 l.t1 ? format_number(*l.t1) : "", l.merge ? "true" : ""};
    if (styled) row.emplace_back(to_string(l.style));
    out.links_csv += csv::write_row(row);
  }

  const bool shaped = std::any_of(spec.labels.begin(), spec.labels.end(),
                                  [](const LabelDef& l) { return l.shape != LabelShape::ellipse; });
  std::vector<std::string> label_header{"stream", "t", "text", "type", "size"};
  if (shaped) label_header.emplace_back("shape");
  out.labels_csv = csv::write_row(label_header);
  for (const auto& l : spec.labels) {
    std::vector<std::string> row{l.stream, format_number(l.t), l.text,
                                 std::string(to_string(l.type)), format_number(l.size)};
    if (shaped) row.emplace_back(to_string(l.shape));
    out.labels_csv += csv::write_row(row);
  }
  return out;
}

Rgb stream_color(const ChartSpec& spec, std::size_t stream_index) {
  const auto& s = spec.streams.at(stream_index);
  if (const auto parsed = parse_color(s.color)) return *parsed;
  return palette_color(stream_index);
}

}  // namespace orcha
