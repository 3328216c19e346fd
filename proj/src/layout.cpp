#include "orcha/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace orcha {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// +1 or -1, fixed for an unordered node pair and seed.
double tie_break(std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
  const std::uint64_t lo = std::min(a, b);
  const std::uint64_t hi = std::max(a, b);
  return (splitmix64(seed ^ (lo << 32 | hi)) & 1U) ? 1.0 : -1.0;
}

std::vector<Time> distinct_times(const LayoutGraph& graph) {
  std::vector<Time> times;
  times.reserve(graph.nodes.size());
  for (const auto& n : graph.nodes) times.push_back(n.t);
  std::sort(times.begin(), times.end());
  const Time eps = 1e-9 * graph.step;
  std::vector<Time> out;
  for (Time t : times) {
    if (out.empty() || t - out.back() > eps) out.push_back(t);
  }
  return out;
}

std::size_t time_index(const std::vector<Time>& times, Time t, Time eps) {
  const auto it = std::lower_bound(times.begin(), times.end(), t - eps);
  return static_cast<std::size_t>(it - times.begin());
}

// Node ids ordered parents before children.
std::vector<std::uint32_t> depth_order(const LayoutGraph& graph) {
  std::vector<std::uint32_t> order(graph.nodes.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return graph.nodes[a].depth < graph.nodes[b].depth;
  });
  return order;
}

bool same_owner(const Node& a, const Node& b) {
  return a.owner_kind == b.owner_kind && a.owner_index == b.owner_index;
}

}  // namespace

double SpringStiffness::of(EdgeClass cls) const {
  switch (cls) {
    case EdgeClass::stream: return stream;
    case EdgeClass::label: return label;
    case EdgeClass::link: return link;
  }
  return 0.0;
}

std::vector<std::string> ForceParams::check() const {
  std::vector<std::string> out;
  if (gravity < 0 || repulsion_strength < 0 || stiffness.stream < 0 || stiffness.label < 0 ||
      stiffness.link < 0) {
    out.emplace_back("force strengths must be non-negative");
  }
  if (!(velocity_decay > 0.0 && velocity_decay < 1.0)) {
    out.emplace_back("velocity_decay must lie in (0, 1)");
  }
  if (!(alpha_min < alpha_start)) out.emplace_back("alpha_min must be below alpha_start");
  if (!(alpha_decay > 0.0 && alpha_decay < 1.0)) out.emplace_back("alpha_decay must lie in (0, 1)");
  if (repulsion_min_distance <= 0.0) out.emplace_back("repulsion_min_distance must be positive");
  if (padding < 0.0 || spring_rest_length < 0.0) out.emplace_back("lengths must be non-negative");
  if (max_ticks == 0) out.emplace_back("max_ticks must be positive");
  return out;
}

SimulationState init_positions(const LayoutGraph& graph, const ForceParams& params,
                               const Canvas& canvas, std::uint64_t seed) {
  SimulationState state;
  state.y.assign(graph.nodes.size(), canvas.height / 2.0);
  state.vy.assign(graph.nodes.size(), 0.0);
  state.alpha = params.alpha_start;
  state.seed = seed;

  const auto times = distinct_times(graph);
  const Time eps = 1e-9 * graph.step;
  std::vector<std::vector<std::uint32_t>> roots(times.size());
  for (const auto& n : graph.nodes) {
    if (!n.parent) roots[time_index(times, n.t, eps)].push_back(n.id.value);
  }
  for (auto& column : roots) {
    std::stable_sort(column.begin(), column.end(), [&](std::uint32_t a, std::uint32_t b) {
      return graph.nodes[a].stack_rank < graph.nodes[b].stack_rank;
    });
    double total = 0.0;
    for (auto id : column) total += graph.nodes[id].size;
    if (!column.empty()) total += params.padding * static_cast<double>(column.size() - 1);
    double top = canvas.height / 2.0 - total / 2.0;
    for (auto id : column) {
      const double s = graph.nodes[id].size;
      state.y[id] = top + s / 2.0;
      top += s + params.padding;
    }
  }
  for (auto id : depth_order(graph)) {
    const auto& n = graph.nodes[id];
    if (n.parent) state.y[id] = state.y[n.parent->value];
  }
  return state;
}

ForceSimulation::ForceSimulation(const LayoutGraph& graph, ForceParams params, Canvas canvas)
    : graph_(graph), params_(params), canvas_(canvas) {
  const auto times = distinct_times(graph);
  const Time eps = 1e-9 * graph.step;
  std::map<std::pair<std::uint32_t, std::size_t>, std::size_t> index;
  for (const auto& n : graph.nodes) {
    const std::uint32_t parent = n.parent ? n.parent->value + 1 : 0;
    const std::size_t ti = time_index(times, n.t, eps);
    auto [it, inserted] = index.try_emplace({parent, ti}, buckets_.size());
    if (inserted) buckets_.push_back({parent, ti, {}});
    buckets_[it->second].members.push_back(n.id.value);
  }
  // Buckets in (parent, time) order keep accumulation order independent of
  // node creation order.
  std::vector<std::size_t> order(buckets_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(buckets_[a].parent, buckets_[a].time_index) <
           std::tie(buckets_[b].parent, buckets_[b].time_index);
  });
  std::vector<Bucket> sorted;
  sorted.reserve(buckets_.size());
  for (auto i : order) sorted.push_back(std::move(buckets_[i]));
  buckets_ = std::move(sorted);
  next_bucket_.assign(buckets_.size(), kNone);
  for (std::size_t i = 0; i + 1 < buckets_.size(); ++i) {
    if (buckets_[i + 1].parent == buckets_[i].parent &&
        buckets_[i + 1].time_index == buckets_[i].time_index + 1) {
      next_bucket_[i] = i + 1;
    }
  }
  clamp_order_ = depth_order(graph);
  degree_.assign(graph.nodes.size(), 0);
  for (const auto& e : graph.edges) {
    ++degree_[e.src.value];
    ++degree_[e.dst.value];
  }
}

void ForceSimulation::apply_gravity(SimulationState& state) const {
  if (params_.gravity == 0.0) return;
  const double center = canvas_.height / 2.0;
  const double k = params_.gravity * state.alpha;
  for (std::size_t i = 0; i < state.y.size(); ++i) state.vy[i] += (center - state.y[i]) * k;
}

void ForceSimulation::repel(SimulationState& state, std::uint32_t a, std::uint32_t b,
                            bool same_time) const {
  const Node& na = graph_.nodes[a];
  const Node& nb = graph_.nodes[b];
  if (same_owner(na, nb)) return;
  const double dy = state.y[b] - state.y[a];
  const double gap = std::abs(dy) - (na.size + nb.size) / 2.0;
  double dist = 0.0;
  double share = 1.0;  // vertical share of the force direction
  if (same_time) {
    dist = gap;
  } else {
    const double dx = nb.x - na.x;
    dist = std::hypot(dx, std::max(gap, 0.0));
    const double len = std::hypot(dx, dy);
    share = len > 0.0 ? std::abs(dy) / len : 0.0;
  }
  if (dist > params_.repulsion_cutoff) return;
  dist = std::max(dist, params_.repulsion_min_distance);
  const double direction = dy != 0.0 ? (dy > 0.0 ? 1.0 : -1.0) : tie_break(state.seed, a, b);
  const double push = params_.repulsion_strength / (dist * dist) * share * state.alpha;
  state.vy[a] -= direction * push;
  state.vy[b] += direction * push;
}

void ForceSimulation::apply_repulsion(SimulationState& state) const {
  if (params_.repulsion_strength == 0.0) return;
  for (std::size_t bi = 0; bi < buckets_.size(); ++bi) {
    const auto& members = buckets_[bi].members;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) repel(state, members[i], members[j], true);
    }
    if (next_bucket_[bi] == kNone) continue;
    for (auto a : members) {
      for (auto b : buckets_[next_bucket_[bi]].members) repel(state, a, b, false);
    }
  }
}

void ForceSimulation::apply_springs(SimulationState& state) const {
  for (const auto& e : graph_.edges) {
    const double k = params_.stiffness.of(e.cls);
    if (k == 0.0) continue;
    const auto a = e.src.value;
    const auto b = e.dst.value;
    const double da = static_cast<double>(degree_[a]);
    const double db = static_cast<double>(degree_[b]);
    const double strength = k / std::min(da, db);
    const double bias = da / (da + db);
    const double dy = state.y[b] - state.y[a];
    double desired = 0.0;
    const Node& na = graph_.nodes[a];
    const Node& nb = graph_.nodes[b];
    if (e.cls == EdgeClass::label && na.t == nb.t) {
      // Outside label tie: hold the label just clear of the stream.
      const double side = dy != 0.0 ? (dy > 0.0 ? 1.0 : -1.0) : tie_break(state.seed, a, b);
      desired = side * ((na.size + nb.size) / 2.0 + params_.spring_rest_length);
    }
    const double f = (dy - desired) * strength * state.alpha;
    state.vy[b] -= f * bias;
    state.vy[a] += f * (1.0 - bias);
  }
}

void ForceSimulation::project(SimulationState& state) const {
  for (auto id : clamp_order_) {
    const Node& n = graph_.nodes[id];
    const double half = n.size / 2.0;
    double lo = 0.0;
    double hi = 0.0;
    double fallback = 0.0;
    if (n.parent) {
      const auto p = n.parent->value;
      const double parent_half = graph_.nodes[p].size / 2.0;
      const double inset = std::min(params_.padding / 2.0, std::max(parent_half - half, 0.0) / 2.0);
      lo = state.y[p] - parent_half + half + inset;
      hi = state.y[p] + parent_half - half - inset;
      fallback = state.y[p];
    } else {
      lo = half + params_.padding;
      hi = canvas_.height - half - params_.padding;
      fallback = canvas_.height / 2.0;
    }
    double& y = state.y[id];
    if (lo > hi) {
      y = fallback;
      state.vy[id] = 0.0;
    } else if (y < lo || y > hi) {
      y = std::clamp(y, lo, hi);
      state.vy[id] = 0.0;
    }
  }
}

void ForceSimulation::tick(SimulationState& state) const {
  apply_gravity(state);
  apply_repulsion(state);
  apply_springs(state);
  const double keep = 1.0 - params_.velocity_decay;
  for (std::size_t i = 0; i < state.y.size(); ++i) {
    state.vy[i] *= keep;
    state.y[i] += state.vy[i];
  }
  project(state);
  state.alpha += (0.0 - state.alpha) * params_.alpha_decay;
  ++state.tick_count;
}

const std::vector<double>& ForceSimulation::run(SimulationState& state) const {
  while (state.tick_count < params_.max_ticks && state.alpha > params_.alpha_min) tick(state);
  project(state);
  return state.y;
}

void tick(SimulationState& state, const LayoutGraph& graph, const ForceParams& params,
          const Canvas& canvas) {
  ForceSimulation(graph, params, canvas).tick(state);
}

const std::vector<double>& run(SimulationState& state, const LayoutGraph& graph,
                               const ForceParams& params, const Canvas& canvas) {
  return ForceSimulation(graph, params, canvas).run(state);
}

SimulationState incremental_relayout(const SimulationState& old_state,
                                     const LayoutGraph& old_graph, const LayoutGraph& new_graph,
                                     const ForceParams& params, const Canvas& canvas,
                                     double reheat_alpha) {
  using Key = std::tuple<NodeKind, std::string, Time>;
  std::map<Key, std::uint32_t> survivors;
  for (const auto& n : old_graph.nodes) survivors.emplace(Key{n.kind, n.owner_key, n.t}, n.id.value);

  SimulationState fresh = init_positions(new_graph, params, canvas, old_state.seed);
  SimulationState state;
  state.y = fresh.y;
  state.vy.assign(new_graph.nodes.size(), 0.0);
  state.alpha = reheat_alpha;
  state.seed = old_state.seed;

  std::vector<bool> kept(new_graph.nodes.size(), false);
  for (const auto& n : new_graph.nodes) {
    const auto it = survivors.find(Key{n.kind, n.owner_key, n.t});
    if (it == survivors.end()) continue;
    state.y[n.id.value] = old_state.y[it->second];
    state.vy[n.id.value] = old_state.vy[it->second];
    kept[n.id.value] = true;
  }

  auto chain_of = [&new_graph](const Node& n) -> const std::vector<NodeId>* {
    switch (n.owner_kind) {
      case OwnerKind::stream: return &new_graph.stream_nodes[n.owner_index];
      case OwnerKind::label: return &new_graph.label_chains[n.owner_index].nodes;
      case OwnerKind::link: return &new_graph.link_chains[n.owner_index].nodes;
    }
    return nullptr;
  };

  for (auto id : depth_order(new_graph)) {
    if (kept[id]) continue;
    const Node& n = new_graph.nodes[id];
    std::optional<std::uint32_t> nearest;
    double best = 0.0;
    if (const auto* chain = chain_of(n)) {
      for (NodeId other : *chain) {
        if (!kept[other.value]) continue;
        const double d = std::abs(new_graph.node(other).t - n.t);
        if (!nearest || d < best) {
          nearest = other.value;
          best = d;
        }
      }
    }
    if (nearest) {
      state.y[id] = state.y[*nearest];
    } else if (n.parent) {
      state.y[id] = state.y[n.parent->value];
    }
  }
  return state;
}

std::vector<std::string> check_constraints(const LayoutGraph& graph, const std::vector<double>& y,
                                           const ForceParams& params, const Canvas& canvas,
                                           double tolerance) {
  std::vector<std::string> out;
  if (y.size() != graph.nodes.size()) {
    out.emplace_back("position count does not match node count");
    return out;
  }
  for (const auto& n : graph.nodes) {
    const double top = y[n.id.value] - n.size / 2.0;
    const double bottom = y[n.id.value] + n.size / 2.0;
    const std::string who = "node " + std::to_string(n.id.value) + " (" + n.owner_key + " @" +
                            format_number(n.t) + ")";
    if (!std::isfinite(y[n.id.value])) {
      out.push_back(who + " has non-finite position");
      continue;
    }
    if (top < params.padding - tolerance || bottom > canvas.height - params.padding + tolerance) {
      out.push_back(who + " leaves the canvas");
    }
    if (n.parent) {
      const Node& p = graph.node(*n.parent);
      const double ptop = y[p.id.value] - p.size / 2.0;
      const double pbottom = y[p.id.value] + p.size / 2.0;
      if (top < ptop - tolerance || bottom > pbottom + tolerance) {
        out.push_back(who + " escapes its parent");
      }
    }
  }
  return out;
}

double wiggle_energy(const LayoutGraph& graph, const std::vector<double>& y,
                     std::size_t stream_index) {
  const auto& chain = graph.stream_nodes.at(stream_index);
  double sum = 0.0;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const double d = y[chain[i].value] - y[chain[i - 1].value];
    sum += d * d;
  }
  return sum;
}

double kinetic_energy(const SimulationState& state) {
  double sum = 0.0;
  for (double v : state.vy) sum += 0.5 * v * v;
  return sum;
}

}  // namespace orcha
