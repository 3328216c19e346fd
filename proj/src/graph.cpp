#include "orcha/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace orcha {
namespace {

Time time_tolerance(Time step) { return 1e-9 * std::max(step, 1e-12); }

// Inserts t into an ascending vector unless a value within `eps` is present.
void insert_time(std::vector<Time>& times, Time t, Time eps) {
  const auto it = std::lower_bound(times.begin(), times.end(), t - eps);
  if (it != times.end() && std::abs(*it - t) <= eps) return;
  times.insert(std::lower_bound(times.begin(), times.end(), t), t);
}

std::vector<Time> stream_grid(const StreamDef& s, Time step) {
  const Time eps = time_tolerance(step);
  std::vector<Time> times;
  const auto n = static_cast<std::size_t>(std::floor((s.t1 - s.t0) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    const Time t = s.t0 + static_cast<Time>(i) * step;
    times.push_back(std::abs(t - s.t1) <= eps ? s.t1 : t);
  }
  if (std::abs(times.back() - s.t1) > eps) times.push_back(s.t1);
  return times;
}

double font_px(const LabelDef& label, const GraphParams& params) {
  return label.size * params.base_font_px;
}

double label_box_height(const LabelDef& label, const GraphParams& params) {
  const double font = font_px(label, params);
  if (label.type == LabelType::on) return font;
  const double box = font * (1.0 + 2.0 * params.label_padding_em);
  // An ellipse circumscribing the box is sqrt(2) taller than the box.
  return label.shape == LabelShape::ellipse ? box * std::numbers::sqrt2 : box;
}

std::string label_key(const LabelDef& label) {
  return "l:" + label.stream + "@" + format_number(label.t) + ":" +
         std::string(to_string(label.type)) + ":" + label.text;
}

std::string link_key(const LinkDef& link, Time step) {
  return "k:" + link.from + "@" + format_number(link.t0) + ">" + link.to + "@" +
         format_number(link_end_time(link, step)) + (link.merge ? ":m" : "");
}

double px_per_step(const LayoutGraph& graph, const GraphParams& params) {
  return params.step * graph.axis.px_per_time;
}

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::stream: return "stream";
    case NodeKind::label_center: return "label-center";
    case NodeKind::label_wing: return "label-wing";
    case NodeKind::link_intermediate: return "link-intermediate";
    case NodeKind::link_anchor: return "link-anchor";
  }
  return "?";
}

std::string_view to_string(EdgeClass cls) {
  switch (cls) {
    case EdgeClass::stream: return "stream";
    case EdgeClass::label: return "label";
    case EdgeClass::link: return "link";
  }
  return "?";
}

std::optional<NodeId> LayoutGraph::stream_node_at(std::size_t stream_index, Time t) const {
  if (stream_index >= stream_nodes.size()) return std::nullopt;
  const auto& chain = stream_nodes[stream_index];
  const Time eps = time_tolerance(step);
  const auto it = std::lower_bound(chain.begin(), chain.end(), t - eps,
                                   [this](NodeId id, Time v) { return node(id).t < v; });
  if (it == chain.end() || std::abs(node(*it).t - t) > eps) return std::nullopt;
  return *it;
}

NodeId LayoutGraph::add_node(Node n) {
  n.id = NodeId{static_cast<std::uint32_t>(nodes.size())};
  children.emplace_back();
  if (n.parent) children[n.parent->value].push_back(n.id);
  nodes.push_back(std::move(n));
  return nodes.back().id;
}

void LayoutGraph::add_edge(NodeId src, NodeId dst, EdgeClass cls) {
  edges.push_back({src, dst, cls});
}

double size_at(const StreamDef& stream, Time t, double default_size) {
  if (t < stream.t0 || t > stream.t1) {
    throw std::out_of_range("size_at: t=" + format_number(t) + " outside stream " + stream.id);
  }
  std::vector<SizeKnot> knots;
  knots.reserve(stream.sizes.size() + 2);
  if (stream.sizes.empty() || stream.sizes.front().t != stream.t0) {
    knots.push_back({stream.t0, default_size});
  }
  knots.insert(knots.end(), stream.sizes.begin(), stream.sizes.end());
  if (knots.back().t != stream.t1) knots.push_back({stream.t1, default_size});

  const auto upper = std::upper_bound(knots.begin(), knots.end(), t,
                                      [](Time v, const SizeKnot& k) { return v < k.t; });
  if (upper == knots.begin()) return knots.front().size;
  const auto lower = std::prev(upper);
  if (lower->t == t || upper == knots.end()) return lower->size;
  const double f = (t - lower->t) / (upper->t - lower->t);
  return lower->size + (upper->size - lower->size) * f;
}

std::size_t code_points(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::size_t label_wing_count(std::string_view text, double size_em, double base_font_px,
                             double px_per_step, double glyph_width_em) {
  const double width = static_cast<double>(code_points(text)) * glyph_width_em * size_em * base_font_px;
  if (width <= 0.0 || px_per_step <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil((width / 2.0) / px_per_step - 1e-12));
}

std::vector<Time> label_chain_times(Time center, Time step, std::size_t wings, Time lo, Time hi) {
  const Time eps = time_tolerance(step);
  std::vector<Time> out;
  for (std::size_t j = wings; j >= 1; --j) {
    const Time t = center - static_cast<Time>(j) * step;
    if (t >= lo - eps) out.push_back(t);
  }
  out.push_back(center);
  for (std::size_t j = 1; j <= wings; ++j) {
    const Time t = center + static_cast<Time>(j) * step;
    if (t <= hi + eps) out.push_back(t);
  }
  return out;
}

LabelChain build_label_chain(const LabelDef& label, std::size_t label_index,
                             std::size_t stream_index, LayoutGraph& graph,
                             const GraphParams& params) {
  const auto& stream_chain = graph.stream_nodes.at(stream_index);
  const bool nested = label.type != LabelType::out;
  const Time lo = nested ? graph.node(stream_chain.front()).t : graph.axis.t_min;
  const Time hi = nested ? graph.node(stream_chain.back()).t : graph.axis.t_max;
  const std::size_t wings =
      label.text.empty() ? 0
                         : label_wing_count(label.text, label.size, params.base_font_px,
                                            px_per_step(graph, params), params.glyph_width_em);
  const auto times = label_chain_times(label.t, params.step, wings, lo, hi);

  std::string key = label_key(label);
  std::size_t repeat = 0;
  for (std::size_t i = 0; i < label_index && i < graph.label_chains.size(); ++i) {
    const auto& other = graph.label_chains[i];
    if (!other.nodes.empty() && graph.node(other.nodes[other.center]).owner_key.rfind(key + "#", 0) == 0) {
      ++repeat;
    }
  }
  key += "#" + std::to_string(repeat);

  const auto stream_at_label = graph.stream_node_at(stream_index, label.t);
  if (!stream_at_label) throw std::logic_error("label stream has no node at t=" + format_number(label.t));
  const std::size_t rank = graph.node(*stream_at_label).stack_rank.first;

  const double box = label_box_height(label, params);
  LabelChain chain;
  const Time eps = time_tolerance(params.step);
  for (const Time t : times) {
    Node n;
    const bool is_center = std::abs(t - label.t) <= eps;
    n.kind = is_center ? NodeKind::label_center : NodeKind::label_wing;
    n.owner_kind = OwnerKind::label;
    n.owner_index = label_index;
    n.owner_key = key;
    n.t = t;
    n.size = box;
    n.stack_rank = {rank, 1 + label_index};
    if (nested) {
      const auto parent = graph.stream_node_at(stream_index, t);
      if (!parent) throw std::logic_error("label stream has no node at t=" + format_number(t));
      const Node& p = graph.node(*parent);
      n.t = p.t;
      n.parent = p.id;
      n.depth = p.depth + 1;
      n.size = std::min(box, p.size);
    }
    n.x = graph.axis.to_px(n.t);
    if (is_center) chain.center = chain.nodes.size();
    chain.nodes.push_back(graph.add_node(std::move(n)));
  }
  for (std::size_t i = 1; i < chain.nodes.size(); ++i) {
    graph.add_edge(chain.nodes[i - 1], chain.nodes[i], EdgeClass::label);
  }
  if (!nested) graph.add_edge(*stream_at_label, chain.nodes[chain.center], EdgeClass::label);
  return chain;
}

LinkChain expand_link(const LinkDef& link, std::size_t link_index, std::size_t from_index,
                      std::size_t to_index, LayoutGraph& graph, const GraphParams& params) {
  const Time eps = time_tolerance(params.step);
  const Time end = link_end_time(link, params.step);
  const auto start = graph.stream_node_at(from_index, link.t0);
  const auto target = graph.stream_node_at(to_index, end);
  if (!start || !target) throw std::logic_error("link endpoint has no stream node");

  std::string key = link_key(link, params.step);
  std::size_t repeat = 0;
  for (std::size_t i = 0; i < link_index && i < graph.link_chains.size(); ++i) {
    const auto& other = graph.link_chains[i];
    if (other.nodes.size() > 1 &&
        graph.node(other.nodes.back()).owner_key.rfind(key + "#", 0) == 0) {
      ++repeat;
    }
  }
  key += "#" + std::to_string(repeat);

  LinkChain chain;
  chain.nodes.push_back(*start);
  const double width = std::min(params.link_width_px, graph.node(*start).size);
  for (std::size_t j = 1;; ++j) {
    const Time t = link.t0 + static_cast<Time>(j) * params.step;
    if (t >= end - eps) break;
    Node n;
    n.kind = NodeKind::link_intermediate;
    n.owner_kind = OwnerKind::link;
    n.owner_index = link_index;
    n.owner_key = key;
    n.t = t;
    n.x = graph.axis.to_px(t);
    n.size = width;
    n.stack_rank = {graph.stream_nodes.size(), link_index};
    chain.nodes.push_back(graph.add_node(std::move(n)));
  }
  if (link.merge) {
    chain.nodes.push_back(*target);
  } else {
    const Node& host = graph.node(*target);
    double size = params.anchor_fraction * host.size;
    size = std::min(std::max(size, 2.0), host.size - 2.0);
    if (size <= 0.0) size = params.anchor_fraction * host.size;
    Node n;
    n.kind = NodeKind::link_anchor;
    n.owner_kind = OwnerKind::link;
    n.owner_index = link_index;
    n.owner_key = key;
    n.t = host.t;
    n.x = host.x;
    n.size = size;
    n.parent = host.id;
    n.depth = host.depth + 1;
    n.stack_rank = host.stack_rank;
    chain.anchor = graph.add_node(std::move(n));
    chain.nodes.push_back(*chain.anchor);
  }
  for (std::size_t i = 1; i < chain.nodes.size(); ++i) {
    graph.add_edge(chain.nodes[i - 1], chain.nodes[i], EdgeClass::link);
  }
  return chain;
}

LayoutGraph build_graph(const ChartSpec& spec, const GraphParams& params) {
  if (!(params.step > 0.0)) throw std::invalid_argument("step must be positive");
  if (auto violations = validate(spec, params.step); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  const Time step = params.step;
  const Time eps = time_tolerance(step);

  LayoutGraph graph;
  graph.step = step;
  if (!spec.streams.empty()) {
    graph.axis.t_min = spec.streams.front().t0;
    graph.axis.t_max = spec.streams.front().t1;
    for (const auto& s : spec.streams) {
      graph.axis.t_min = std::min(graph.axis.t_min, s.t0);
      graph.axis.t_max = std::max(graph.axis.t_max, s.t1);
    }
  }
  const double usable = std::max(params.width - 2.0 * params.margin, 1.0);
  if (graph.axis.t_max > graph.axis.t_min) {
    graph.axis.left_px = params.margin;
    graph.axis.px_per_time = usable / (graph.axis.t_max - graph.axis.t_min);
  } else {
    graph.axis.left_px = params.width / 2.0;
    graph.axis.px_per_time = usable / step;
  }
  const double pps = step * graph.axis.px_per_time;

  const std::size_t n = spec.streams.size();
  std::vector<std::size_t> parent_of(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.streams[i].parent) parent_of[i] = *spec.stream_index(*spec.streams[i].parent);
  }
  std::vector<int> depth(n, 0);
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    root[i] = i;
    while (parent_of[root[i]] != n) {
      root[i] = parent_of[root[i]];
      ++depth[i];
    }
  }

  // Times each stream must carry: its own grid plus every time that nested
  // content or link endpoints attach to, propagated up the parent chain.
  std::vector<std::vector<Time>> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = stream_grid(spec.streams[i], step);
  for (const auto& label : spec.labels) {
    const std::size_t s = *spec.stream_index(label.stream);
    insert_time(base[s], label.t, eps);
    if (label.type == LabelType::out || label.text.empty()) continue;
    const std::size_t wings = label_wing_count(label.text, label.size, params.base_font_px, pps,
                                               params.glyph_width_em);
    for (Time t : label_chain_times(label.t, step, wings, spec.streams[s].t0, spec.streams[s].t1)) {
      insert_time(base[s], t, eps);
    }
  }
  for (const auto& link : spec.links) {
    insert_time(base[*spec.stream_index(link.from)], link.t0, eps);
    insert_time(base[*spec.stream_index(link.to)], link_end_time(link, step), eps);
  }
  std::vector<std::vector<Time>> times = base;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = parent_of[i]; a != n; a = parent_of[a]) {
      for (Time t : base[i]) insert_time(times[a], t, eps);
    }
  }

  graph.stream_nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = spec.streams[i];
    for (Time t : times[i]) {
      Node node;
      node.kind = NodeKind::stream;
      node.owner_kind = OwnerKind::stream;
      node.owner_index = i;
      node.owner_key = "s:" + s.id;
      node.t = std::clamp(t, s.t0, s.t1);
      node.x = graph.axis.to_px(node.t);
      node.size = size_at(s, node.t, params.default_size) * params.unit_px;
      node.depth = depth[i];
      node.stack_rank = {root[i], 0};
      graph.stream_nodes[i].push_back(graph.add_node(std::move(node)));
    }
  }

  // Nest stream nodes, parents first so child sizes clamp to final parent sizes.
  std::vector<std::size_t> by_depth(n);
  for (std::size_t i = 0; i < n; ++i) by_depth[i] = i;
  std::stable_sort(by_depth.begin(), by_depth.end(),
                   [&](std::size_t a, std::size_t b) { return depth[a] < depth[b]; });
  for (std::size_t i : by_depth) {
    if (parent_of[i] == n) continue;
    for (NodeId id : graph.stream_nodes[i]) {
      Node& child = graph.nodes[id.value];
      const auto parent = graph.stream_node_at(parent_of[i], child.t);
      if (!parent) throw std::logic_error("nested stream node without parent node");
      child.parent = parent;
      child.size = std::min(child.size, graph.node(*parent).size);
      graph.children[parent->value].push_back(id);
    }
  }

  graph.label_chains.reserve(spec.labels.size());
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    const auto& label = spec.labels[i];
    graph.label_chains.push_back(
        build_label_chain(label, i, *spec.stream_index(label.stream), graph, params));
  }
  graph.link_chains.reserve(spec.links.size());
  for (std::size_t i = 0; i < spec.links.size(); ++i) {
    const auto& link = spec.links[i];
    graph.link_chains.push_back(expand_link(link, i, *spec.stream_index(link.from),
                                            *spec.stream_index(link.to), graph, params));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& chain = graph.stream_nodes[i];
    for (std::size_t k = 1; k < chain.size(); ++k) {
      graph.add_edge(chain[k - 1], chain[k], EdgeClass::stream);
    }
  }
  return graph;
}

bool check_acyclic(const LayoutGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& e : graph.edges) {
    if (e.cls == EdgeClass::label) continue;
    if (e.src.value >= n || e.dst.value >= n) return false;
    out[e.src.value].push_back(e.dst.value);
    ++indegree[e.dst.value];
  }
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop();
    ++visited;
    for (std::size_t w : out[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  return visited == n;
}

}  // namespace orcha
