#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orcha/chart_model.hpp"

namespace orcha {

struct NodeId {
  std::uint32_t value = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeKind { stream, label_center, label_wing, link_intermediate, link_anchor };
enum class OwnerKind { stream, label, link };
enum class EdgeClass { stream, label, link };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeClass cls);

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::stream;
  OwnerKind owner_kind = OwnerKind::stream;
  std::size_t owner_index = 0;  // index into the spec table of owner_kind
  std::string owner_key;        // stable across edits; used for warm starts
  Time t = 0.0;
  double x = 0.0;     // time_to_px(t), never changes
  double size = 0.0;  // vertical extent in px
  std::optional<NodeId> parent;
  int depth = 0;
  // Initial stacking position among root nodes: (major, minor), ascending.
  std::pair<std::size_t, std::size_t> stack_rank{0, 0};
};

struct Edge {
  NodeId src;
  NodeId dst;
  EdgeClass cls = EdgeClass::stream;
};

/// Linear map from chart time to horizontal pixels.
struct TimeAxis {
  Time t_min = 0.0;
  Time t_max = 1.0;
  double left_px = 0.0;
  double px_per_time = 1.0;

  double to_px(Time t) const { return left_px + (t - t_min) * px_per_time; }
};

struct GraphParams {
  Time step = 1.0;
  double width = 1200.0;   // layout canvas, px
  double height = 700.0;
  double margin = 60.0;    // horizontal inset of the time range
  double default_size = 5.0;  // thickness units at stream ends
  double unit_px = 6.0;       // px per thickness unit
  double base_font_px = 10.0;  // px per label em
  double glyph_width_em = 0.6;
  double label_padding_em = 0.4;
  double anchor_fraction = 0.3;
  double link_width_px = 4.0;
};

/// Label nodes ordered left to right; `center` indexes into `nodes`.
struct LabelChain {
  std::vector<NodeId> nodes;
  std::size_t center = 0;
};

/// Link path from the source stream node to its terminal node (the target
/// stream node for merges, the anchor otherwise).
struct LinkChain {
  std::vector<NodeId> nodes;
  std::optional<NodeId> anchor;
};

struct LayoutGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<NodeId>> children;      // by parent node index
  std::vector<std::vector<NodeId>> stream_nodes;  // per stream, ascending t
  std::vector<LabelChain> label_chains;           // per label
  std::vector<LinkChain> link_chains;             // per link
  TimeAxis axis;
  Time step = 1.0;

  const Node& node(NodeId id) const { return nodes[id.value]; }
  std::size_t size() const { return nodes.size(); }

  /// Node of stream `stream_index` at time t (matched within a tiny fraction
  /// of a step), if one exists.
  std::optional<NodeId> stream_node_at(std::size_t stream_index, Time t) const;

  NodeId add_node(Node node);
  void add_edge(NodeId src, NodeId dst, EdgeClass cls);
};

/// Piecewise-linear thickness through (t0, default), every sizes knot and
/// (t1, default). A knot placed exactly at t0 or t1 replaces the default there.
/// Throws std::out_of_range when t lies outside [t0, t1].
double size_at(const StreamDef& stream, Time t, double default_size);

/// Wing nodes per side: ceil(half the estimated text width / px_per_step).
std::size_t label_wing_count(std::string_view text, double size_em, double base_font_px,
                             double px_per_step, double glyph_width_em = 0.6);

/// Number of UTF-8 code points in `text`.
std::size_t code_points(std::string_view text);

/// Full construction: validates, then creates stream chains, label chains
/// and link edges. Throws ValidationError for an invalid spec and
/// std::invalid_argument for a non-positive step.
LayoutGraph build_graph(const ChartSpec& spec, const GraphParams& params);

/// Appends the node chain of one label. Nested labels (in/on) take the
/// stream node at each chain time as parent; out labels stay free and get one
/// extra label edge from the center to the stream node at t.
/// Precondition: the stream nodes at every chain time already exist.
LabelChain build_label_chain(const LabelDef& label, std::size_t label_index,
                             std::size_t stream_index, LayoutGraph& graph,
                             const GraphParams& params);

/// Appends link edges (with intermediate nodes at whole steps) and, for a
/// non-merge link, the anchor node nested in the target stream.
LinkChain expand_link(const LinkDef& link, std::size_t link_index, std::size_t from_index,
                      std::size_t to_index, LayoutGraph& graph, const GraphParams& params);

/// True iff the stream + link edges admit a topological order.
bool check_acyclic(const LayoutGraph& graph);

/// Chain times of a label before nesting lookups: center t and t +- j*step,
/// j = 1..k, clipped to [lo, hi]. Ascending.
std::vector<Time> label_chain_times(Time center, Time step, std::size_t wings, Time lo, Time hi);

}  // namespace orcha
