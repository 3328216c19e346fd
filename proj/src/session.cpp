#include "orcha/session.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace orcha {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  }
  return it->get<double>();
}

std::string text(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_text(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  if (it->get<std::string>().empty()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

Table table_field(const json& j, const char* key) {
  std::string token = text(j, key);
  if (!token.empty() && token.back() != 's') token += 's';  // "stream" -> "streams"
  const auto table = parse_table(token);
  if (!table) throw std::invalid_argument("unknown table '" + text(j, key) + "'");
  return *table;
}

LinkStyle link_style_field(const json& j) {
  const auto token = optional_text(j, "style");
  if (!token || *token == "ribbon") return LinkStyle::ribbon;
  if (*token == "line") return LinkStyle::line;
  if (*token == "arrow") return LinkStyle::arrow;
  throw std::invalid_argument("unknown link style '" + *token + "'");
}

NewStream new_stream_fields(const json& j) {
  NewStream s;
  s.id = optional_text(j, "id");
  s.color = optional_text(j, "color").value_or("");
  s.parent = optional_text(j, "parent");
  return s;
}

void put_new_stream(json& j, const NewStream& s) {
  if (s.id) j["id"] = *s.id;
  if (!s.color.empty()) j["color"] = s.color;
  if (s.parent) j["parent"] = *s.parent;
}

Violation reject(Table table, std::size_t row, std::string message, std::string detail = {}) {
  return {table, row, std::move(message), std::move(detail)};
}

std::string fresh_stream_id(const ChartSpec& spec) {
  for (std::size_t n = spec.streams.size() + 1;; ++n) {
    std::string id = "S" + std::to_string(n);
    if (!spec.find_stream(id)) return id;
  }
}

// Appends a stream built from `fields`. A blank color is pinned to the
// palette entry of its slot so later deletions do not recolor it.
void append_stream(ChartSpec& spec, const NewStream& fields, Time t0, Time t1) {
  StreamDef s;
  s.id = fields.id.value_or(fresh_stream_id(spec));
  s.t0 = t0;
  s.t1 = t1;
  s.color = fields.color.empty() ? to_hex(palette_color(spec.streams.size())) : fields.color;
  s.parent = fields.parent;
  spec.streams.push_back(std::move(s));
}

std::optional<std::size_t> parse_index(std::string_view token) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<Violation> add_link(ChartSpec& spec, const AddLink& op, Time step) {
  const std::size_t row = spec.links.size() + 1;
  if (!op.from && !op.to) {
    return {reject(Table::links, row, "link needs at least one existing endpoint")};
  }
  LinkDef link;
  link.t0 = op.t0;
  link.t1 = op.t1;
  link.merge = op.merge;
  link.style = op.style;
  const Time t_end = link_end_time(link, step);
  if (!(t_end > op.t0)) return {reject(Table::links, row, "link must advance in time")};

  if (!op.from) {
    // Empty space -> stream: the new stream covers the drag up to one step
    // before the target time and feeds into it.
    const Time t1 = std::max(op.t0, t_end - step);
    append_stream(spec, op.stream, op.t0, t1);
    link.from = spec.streams.back().id;
    link.t0 = t1;
    link.t1 = t_end;
    link.to = *op.to;
  } else if (!op.to) {
    const Time t0 = std::min(op.t0 + step, t_end);
    append_stream(spec, op.stream, t0, t_end);
    link.from = *op.from;
    link.to = spec.streams.back().id;
    link.t1 = t0;
  } else {
    link.from = *op.from;
    link.to = *op.to;
  }
  spec.links.push_back(std::move(link));
  return {};
}

std::vector<Violation> set_size_at(ChartSpec& spec, const SetSizeAt& op) {
  const auto index = spec.stream_index(op.stream);
  if (!index) return {reject(Table::streams, 0, "unknown stream", "'" + op.stream + "'")};
  auto& sizes = spec.streams[*index].sizes;
  const auto pos = std::lower_bound(sizes.begin(), sizes.end(), op.t,
                                    [](const SizeKnot& k, Time t) { return k.t < t; });
  if (pos != sizes.end() && pos->t == op.t) {
    pos->size = op.size;
  } else {
    sizes.insert(pos, SizeKnot{op.t, op.size});
  }
  return {};
}

std::vector<Violation> delete_entity(ChartSpec& spec, const DeleteEntity& op) {
  if (op.kind == Table::streams) {
    if (!spec.find_stream(op.id)) return {reject(Table::streams, 0, "unknown stream", "'" + op.id + "'")};
    // Collect the stream and every descendant.
    std::vector<std::string> doomed{op.id};
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& s : spec.streams) {
        if (s.parent && std::find(doomed.begin(), doomed.end(), *s.parent) != doomed.end() &&
            std::find(doomed.begin(), doomed.end(), s.id) == doomed.end()) {
          doomed.push_back(s.id);
          grew = true;
        }
      }
    }
    auto gone = [&doomed](const std::string& id) {
      return std::find(doomed.begin(), doomed.end(), id) != doomed.end();
    };
    std::erase_if(spec.streams, [&](const StreamDef& s) { return gone(s.id); });
    std::erase_if(spec.links, [&](const LinkDef& l) { return gone(l.from) || gone(l.to); });
    std::erase_if(spec.labels, [&](const LabelDef& l) { return gone(l.stream); });
    return {};
  }
  const auto index = parse_index(op.id);
  const std::size_t count = op.kind == Table::links ? spec.links.size() : spec.labels.size();
  if (!index || *index >= count) {
    return {reject(op.kind, 0, "no such entry", "index '" + op.id + "'")};
  }
  if (op.kind == Table::links) {
    spec.links.erase(spec.links.begin() + static_cast<std::ptrdiff_t>(*index));
  } else {
    spec.labels.erase(spec.labels.begin() + static_cast<std::ptrdiff_t>(*index));
  }
  return {};
}

std::vector<Violation> replace_csv(ChartSpec& spec, const ReplaceCsv& op) {
  try {
    switch (op.table) {
      case Table::streams: spec.streams = parse_streams(op.text); break;
      case Table::links: spec.links = parse_links(op.text); break;
      case Table::labels: spec.labels = parse_labels(op.text); break;
    }
  } catch (const ParseError& e) {
    return {reject(e.table(), e.line() > 1 ? e.line() - 1 : 0, "unreadable table", e.what())};
  } catch (const ValidationError& e) {
    return e.violations();
  } catch (const std::exception& e) {
    return {reject(op.table, 0, "unreadable table", e.what())};
  }
  return {};
}

}  // namespace

EditOp edit_op_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("op must be a JSON object");
  const std::string kind = text(j, "op");
  if (kind == "AddStream") {
    return AddStream{number(j, "t0"), number(j, "t1"), new_stream_fields(j)};
  }
  if (kind == "AddLink") {
    AddLink op;
    op.from = optional_text(j, "from");
    op.t0 = number(j, "t0");
    op.to = optional_text(j, "to");
    op.t1 = optional_number(j, "t1");
    op.merge = j.value("merge", false);
    op.style = link_style_field(j);
    if (const auto s = j.find("stream"); s != j.end() && s->is_object()) op.stream = new_stream_fields(*s);
    return op;
  }
  if (kind == "SetSizeAt") return SetSizeAt{text(j, "stream"), number(j, "t"), number(j, "size")};
  if (kind == "AddLabel") {
    LabelDef label;
    label.stream = text(j, "stream");
    label.t = number(j, "t");
    label.text = text(j, "text");
    const auto type = parse_label_type(j.value("type", std::string("in")));
    if (!type) throw std::invalid_argument("unknown label type '" + j.value("type", std::string()) + "'");
    label.type = *type;
    label.size = optional_number(j, "size").value_or(1.0);
    const auto shape = optional_text(j, "shape");
    if (shape == "rect") {
      label.shape = LabelShape::rect;
    } else if (shape && shape != "ellipse") {
      throw std::invalid_argument("unknown label shape '" + *shape + "'");
    }
    return AddLabel{std::move(label)};
  }
  if (kind == "DeleteEntity") {
    const auto& id = j.at("id");
    std::string token;
    if (id.is_string()) {
      token = id.get<std::string>();
    } else if (id.is_number_integer() && id.get<std::int64_t>() >= 0) {
      token = std::to_string(id.get<std::int64_t>());
    } else {
      throw std::invalid_argument("field 'id' must be a string or index");
    }
    return DeleteEntity{table_field(j, "kind"), token};
  }
  if (kind == "ReplaceCsv") return ReplaceCsv{table_field(j, "table"), text(j, "text")};
  if (kind == "Relayout") return Relayout{};
  throw std::invalid_argument("unknown op '" + kind + "'");
}

json to_json(const EditOp& op) {
  return std::visit(
      Overloaded{
          [](const AddStream& o) {
            json j{{"op", "AddStream"}, {"t0", o.t0}, {"t1", o.t1}};
            put_new_stream(j, o.stream);
            return j;
          },
          [](const AddLink& o) {
            json j{{"op", "AddLink"}, {"t0", o.t0}, {"merge", o.merge}};
            if (o.from) j["from"] = *o.from;
            if (o.to) j["to"] = *o.to;
            if (o.t1) j["t1"] = *o.t1;
            if (o.style != LinkStyle::ribbon) j["style"] = to_string(o.style);
            json s = json::object();
            put_new_stream(s, o.stream);
            if (!s.empty()) j["stream"] = s;
            return j;
          },
          [](const SetSizeAt& o) {
            return json{{"op", "SetSizeAt"}, {"stream", o.stream}, {"t", o.t}, {"size", o.size}};
          },
          [](const AddLabel& o) {
            json j{{"op", "AddLabel"},          {"stream", o.label.stream},
                   {"t", o.label.t},            {"text", o.label.text},
                   {"type", to_string(o.label.type)}, {"size", o.label.size}};
            if (o.label.shape != LabelShape::ellipse) j["shape"] = to_string(o.label.shape);
            return j;
          },
          [](const DeleteEntity& o) {
            return json{{"op", "DeleteEntity"}, {"kind", to_string(o.kind)}, {"id", o.id}};
          },
          [](const ReplaceCsv& o) {
            return json{{"op", "ReplaceCsv"}, {"table", to_string(o.table)}, {"text", o.text}};
          },
          [](const Relayout&) { return json{{"op", "Relayout"}}; },
      },
      op);
}

std::variant<ChartSpec, std::vector<Violation>> apply_op(const ChartSpec& spec, const EditOp& op,
                                                          Time step) {
  ChartSpec next = spec;
  std::vector<Violation> early = std::visit(
      Overloaded{
          [&](const AddStream& o) {
            append_stream(next, o.stream, o.t0, o.t1);
            return std::vector<Violation>{};
          },
          [&](const AddLink& o) { return add_link(next, o, step); },
          [&](const SetSizeAt& o) { return set_size_at(next, o); },
          [&](const AddLabel& o) {
            next.labels.push_back(o.label);
            return std::vector<Violation>{};
          },
          [&](const DeleteEntity& o) { return delete_entity(next, o); },
          [&](const ReplaceCsv& o) { return replace_csv(next, o); },
          [&](const Relayout&) { return std::vector<Violation>{}; },
      },
      op);
  if (!early.empty()) return early;
  if (auto violations = validate(next, step); !violations.empty()) return violations;
  return next;
}

Session::Session(ChartSpec spec, Config config) : config_(std::move(config)) {
  ChartLayout layout = layout_chart(spec, config_);
  history_.push_back({std::move(spec), std::move(layout)});
}

EditResult Session::apply(const EditOp& op) {
  EditResult result;
  result.revision = revision();
  auto outcome = apply_op(spec(), op, config_.graph.step);
  if (auto* violations = std::get_if<std::vector<Violation>>(&outcome)) {
    result.violations = std::move(*violations);
    return result;
  }
  ChartSpec next = std::move(std::get<ChartSpec>(outcome));

  Snapshot snap;
  try {
    if (std::holds_alternative<Relayout>(op)) {
      snap.layout = layout_chart(next, config_);
    } else {
      auto graph = std::make_shared<const LayoutGraph>(build_graph(next, config_.graph));
      ForceParams budget = config_.force;
      budget.max_ticks = config_.relayout.max_ticks;
      snap.layout.state = incremental_relayout(layout().state, *layout().graph, *graph, budget,
                                               config_.canvas(), config_.relayout.reheat_alpha);
      ForceSimulation(*graph, budget, config_.canvas()).run(snap.layout.state);
      snap.layout.graph = std::move(graph);
    }
  } catch (const ValidationError& e) {
    result.violations = e.violations();
    return result;
  }
  result.ticks = snap.layout.state.tick_count;
  snap.spec = std::move(next);
  history_.push_back(std::move(snap));
  result.accepted = true;
  result.revision = revision();
  return result;
}

SvgDocument Session::svg() const { return render_svg(spec(), layout(), config_); }

std::optional<SvgDocument> Session::svg_at(std::uint64_t rev) const {
  if (rev >= history_.size()) return std::nullopt;
  const auto& snap = history_[rev];
  return render_svg(snap.spec, snap.layout, config_);
}

json Session::layout_json() const {
  json j = layout_to_json(*layout().graph, layout().state);
  j["revision"] = revision();
  return j;
}

json spec_to_json(const ChartSpec& spec) {
  json streams = json::array();
  for (const auto& s : spec.streams) {
    json sizes = json::array();
    for (const auto& k : s.sizes) sizes.push_back({k.t, k.size});
    streams.push_back({{"id", s.id},
                       {"t0", s.t0},
                       {"t1", s.t1},
                       {"color", s.color},
                       {"sizes", sizes},
                       {"parent", s.parent ? json(*s.parent) : json(nullptr)}});
  }
  json links = json::array();
  for (const auto& l : spec.links) {
    links.push_back({{"from", l.from},
                     {"t0", l.t0},
                     {"to", l.to},
                     {"t1", l.t1 ? json(*l.t1) : json(nullptr)},
                     {"merge", l.merge},
                     {"style", to_string(l.style)}});
  }
  json labels = json::array();
  for (const auto& l : spec.labels) {
    labels.push_back({{"stream", l.stream},
                      {"t", l.t},
                      {"text", l.text},
                      {"type", to_string(l.type)},
                      {"size", l.size},
                      {"shape", to_string(l.shape)}});
  }
  return {{"streams", streams}, {"links", links}, {"labels", labels}};
}

json violations_to_json(const std::vector<Violation>& violations) {
  json out = json::array();
  for (const auto& v : violations) {
    out.push_back({{"table", to_string(v.table)},
                   {"row", v.row},
                   {"message", v.message},
                   {"detail", v.detail},
                   {"text", v.describe()}});
  }
  return out;
}

json layout_to_json(const LayoutGraph& graph, const SimulationState& state) {
  json nodes = json::array();
  for (const auto& n : graph.nodes) {
    nodes.push_back({{"id", n.id.value},
                     {"kind", to_string(n.kind)},
                     {"owner", n.owner_key},
                     {"ownerIndex", n.owner_index},
                     {"t", n.t},
                     {"x", n.x},
                     {"y", state.y[n.id.value]},
                     {"size", n.size},
                     {"parent", n.parent ? json(n.parent->value) : json(nullptr)}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"src", e.src.value}, {"dst", e.dst.value}, {"class", to_string(e.cls)}});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"ticks", state.tick_count}, {"alpha", state.alpha}};
}

}  // namespace orcha
