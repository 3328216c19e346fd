#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orcha/graph.hpp"

namespace orcha {

struct Canvas {
  double width = 1200.0;
  double height = 700.0;
};

struct SpringStiffness {
  double stream = 1.0;
  double label = 0.5;
  double link = 0.1;

  double of(EdgeClass cls) const;
};

struct ForceParams {
  double gravity = 0.05;
  double repulsion_strength = 900.0;  // px^2 scale: force = strength / d^2
  double repulsion_cutoff = 150.0;
  double repulsion_min_distance = 5.0;
  SpringStiffness stiffness;
  // Extra gap kept between an outside label and the stream it is tied to.
  double spring_rest_length = 8.0;
  double velocity_decay = 0.6;
  double alpha_start = 1.0;
  double alpha_decay = 0.02276277904418933;  // 1 - 0.001^(1/300)
  double alpha_min = 0.001;
  std::size_t max_ticks = 300;
  double padding = 6.0;

  /// Broken parameter rules; empty when usable.
  std::vector<std::string> check() const;
};

/// Mutable layout state. Only vertical coordinates live here: horizontal
/// positions are a pure function of node time and stay in the graph.
struct SimulationState {
  std::vector<double> y;
  std::vector<double> vy;
  double alpha = 1.0;
  std::size_t tick_count = 0;
  std::uint64_t seed = 0;
};

/// Nodes stacked per timepoint in declaration order, block-centered on the
/// canvas; nested nodes start at their parent's center.
SimulationState init_positions(const LayoutGraph& graph, const ForceParams& params,
                               const Canvas& canvas, std::uint64_t seed = 0);

/// Force iteration bound to one graph. Precomputes the neighbor buckets and
/// clamp order once so repeated ticks only do arithmetic.
class ForceSimulation {
 public:
  ForceSimulation(const LayoutGraph& graph, ForceParams params, Canvas canvas);

  /// gravity, repulsion, springs, integration, clamp, alpha decay.
  void tick(SimulationState& state) const;

  /// Ticks until alpha <= alpha_min or max_ticks; always ends projected onto
  /// the boundary and containment constraints.
  const std::vector<double>& run(SimulationState& state) const;

  /// Hard projection onto canvas bounds and parent extents (parents first).
  void project(SimulationState& state) const;

  const ForceParams& params() const { return params_; }

 private:
  struct Bucket {
    std::uint32_t parent = 0;  // parent node id + 1, 0 for roots
    std::size_t time_index = 0;
    std::vector<std::uint32_t> members;
  };

  void apply_gravity(SimulationState& state) const;
  void apply_repulsion(SimulationState& state) const;
  void apply_springs(SimulationState& state) const;
  void repel(SimulationState& state, std::uint32_t a, std::uint32_t b, bool same_time) const;

  const LayoutGraph& graph_;
  ForceParams params_;
  Canvas canvas_;
  std::vector<Bucket> buckets_;
  std::vector<std::size_t> next_bucket_;  // same parent, next timepoint; npos if none
  std::vector<std::uint32_t> clamp_order_;
  std::vector<std::size_t> degree_;
};

void tick(SimulationState& state, const LayoutGraph& graph, const ForceParams& params,
          const Canvas& canvas);

const std::vector<double>& run(SimulationState& state, const LayoutGraph& graph,
                               const ForceParams& params, const Canvas& canvas);

/// Warm start for an edited chart: nodes that survive the edit (same kind,
/// owner key and time) keep their position and velocity; new nodes copy the
/// nearest surviving node along their own chain, else start at their parent's
/// current position or their stacked position. Alpha restarts at reheat_alpha.
SimulationState incremental_relayout(const SimulationState& old_state,
                                     const LayoutGraph& old_graph, const LayoutGraph& new_graph,
                                     const ForceParams& params, const Canvas& canvas,
                                     double reheat_alpha = 0.3);

/// Boundary and containment violations of the given positions (tolerance in px).
std::vector<std::string> check_constraints(const LayoutGraph& graph, const std::vector<double>& y,
                                           const ForceParams& params, const Canvas& canvas,
                                           double tolerance = 1e-6);

/// Sum of squared vertical steps along a stream's node chain.
double wiggle_energy(const LayoutGraph& graph, const std::vector<double>& y,
                     std::size_t stream_index);

double kinetic_energy(const SimulationState& state);

}  // namespace orcha
