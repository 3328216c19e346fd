#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "orcha/layout.hpp"
#include "orcha/synth.hpp"
#include "test_helpers.hpp"

using namespace orcha;

namespace {

struct Laid {
  LayoutGraph graph;
  SimulationState state;
};

Laid lay_out(const ChartSpec& spec, const ForceParams& fp = {}, std::uint64_t seed = 42) {
  Laid out{build_graph(spec, {}), {}};
  out.state = init_positions(out.graph, fp, Canvas{}, seed);
  run(out.state, out.graph, fp, Canvas{});
  return out;
}

}  // namespace

TEST(Layout, DefaultAlphaDecayReachesMinimumInBudget) {
  ForceParams p;
  EXPECT_NEAR(std::pow(1.0 - p.alpha_decay, 300), p.alpha_min, 1e-12);
  EXPECT_TRUE(p.check().empty());
}

TEST(Layout, ParameterChecks) {
  ForceParams p;
  p.velocity_decay = 1.5;
  p.max_ticks = 0;
  EXPECT_EQ(p.check().size(), 2u);
}

TEST(Layout, InitialStackIsInsideCanvas) {
  const LayoutGraph g = build_graph(fixtures::fig2a(), {});
  const ForceParams p;
  const auto s = init_positions(g, p, Canvas{}, 1);
  EXPECT_TRUE(check_constraints(g, s.y, p, Canvas{}).empty());
}

TEST(Layout, FigureRunSatisfiesConstraints) {
  const Laid l = lay_out(fixtures::fig2a());
  EXPECT_LE(l.state.tick_count, 300u);
  const auto problems = check_constraints(l.graph, l.state.y, ForceParams{}, Canvas{});
  EXPECT_TRUE(problems.empty()) << problems.front();
}

TEST(Layout, StreamsEndUpApart) {
  const Laid l = lay_out(fixtures::fig2a());
  // A and B overlap in [3, 6]; at t=5 neither may cover the other's center.
  const Node& a = l.graph.node(*l.graph.stream_node_at(0, 5));
  const Node& b = l.graph.node(*l.graph.stream_node_at(1, 5));
  EXPECT_GT(std::abs(l.state.y[a.id.value] - l.state.y[b.id.value]), (a.size + b.size) / 4);
}

TEST(Layout, SameSeedSameBits) {
  const Laid a = lay_out(fixtures::fig2a(), {}, 7);
  const Laid b = lay_out(fixtures::fig2a(), {}, 7);
  ASSERT_EQ(a.state.y.size(), b.state.y.size());
  EXPECT_EQ(std::memcmp(a.state.y.data(), b.state.y.data(), a.state.y.size() * sizeof(double)), 0);
}

TEST(Layout, OutsideLabelStaysOffItsStream) {
  const ChartSpec spec = fixtures::fig2a();
  const Laid l = lay_out(spec);
  const auto& chain = l.graph.label_chains[1];
  const Node& center = l.graph.node(chain.nodes[chain.center]);
  const Node& stream = l.graph.node(*l.graph.stream_node_at(1, 6));
  const double gap = std::abs(l.state.y[center.id.value] - l.state.y[stream.id.value]);
  EXPECT_GT(gap, stream.size / 2);
}

TEST(Layout, RandomSpecsSatisfyConstraints) {
  const ForceParams p;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const ChartSpec spec = random_spec(seed);
    LayoutGraph g = build_graph(spec, {});
    std::vector<double> xs;
    for (const auto& n : g.nodes) xs.push_back(n.x);
    auto s = init_positions(g, p, Canvas{}, seed);
    run(s, g, p, Canvas{});
    EXPECT_LE(s.tick_count, p.max_ticks);
    const auto problems = check_constraints(g, s.y, p, Canvas{});
    EXPECT_TRUE(problems.empty()) << "seed " << seed << ": " << problems.front();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_EQ(std::memcmp(&xs[i], &g.nodes[i].x, sizeof(double)), 0);
    }
    for (double y : s.y) EXPECT_TRUE(std::isfinite(y));
  }
}

TEST(Layout, ProjectionFixesArbitraryPositions) {
  const LayoutGraph g = build_graph(random_spec(3), {});
  const ForceParams p;
  ForceSimulation sim(g, p, Canvas{});
  SimulationState s = init_positions(g, p, Canvas{}, 3);
  for (std::size_t i = 0; i < s.y.size(); ++i) s.y[i] = (i % 2 ? -500.0 : 5000.0) + i;
  sim.project(s);
  EXPECT_TRUE(check_constraints(g, s.y, p, Canvas{}).empty());
}

TEST(Layout, WiggleFallsWithStreamStiffness) {
  const ChartSpec spec = fixtures::crossing_streams();
  for (std::size_t stream = 0; stream < spec.streams.size(); ++stream) {
    double previous = INFINITY;
    for (double k : {0.1, 0.5, 1.0}) {
      ForceParams p;
      p.stiffness.stream = k;
      const Laid l = lay_out(spec, p);
      const double w = wiggle_energy(l.graph, l.state.y, stream);
      EXPECT_LE(w, previous + 1e-9) << spec.streams[stream].id << " k=" << k;
      previous = w;
    }
  }
}

TEST(Layout, WiggleEnergyOfStraightStreamIsZero) {
  const ChartSpec spec = parse_chart("id,t0,t1,color,size,parent\nX,0,5,,,\n", "", "");
  const LayoutGraph g = build_graph(spec, {});
  const std::vector<double> y(g.size(), 100.0);
  EXPECT_EQ(wiggle_energy(g, y, 0), 0.0);
}

TEST(Layout, IncrementalRelayoutKeepsSurvivors) {
  const ChartSpec before = fixtures::fig2a();
  const ForceParams p;
  const Laid l = lay_out(before);

  ChartSpec after = before;
  after.labels.push_back({"A", 5, "new", LabelType::out, 1, LabelShape::ellipse});
  const LayoutGraph g2 = build_graph(after, {});
  SimulationState s2 = incremental_relayout(l.state, l.graph, g2, p, Canvas{}, 0.3);
  EXPECT_DOUBLE_EQ(s2.alpha, 0.3);
  EXPECT_EQ(s2.tick_count, 0u);
  std::size_t matched = 0;
  for (const auto& old : l.graph.nodes) {
    for (const auto& n : g2.nodes) {
      if (n.kind == old.kind && n.owner_key == old.owner_key && n.t == old.t) {
        EXPECT_EQ(s2.y[n.id.value], l.state.y[old.id.value]) << n.owner_key;
        EXPECT_EQ(s2.vy[n.id.value], l.state.vy[old.id.value]);
        ++matched;
      }
    }
  }
  EXPECT_EQ(matched, l.graph.size());

  ForceParams budget = p;
  budget.max_ticks = 120;
  run(s2, g2, budget, Canvas{});
  EXPECT_LE(s2.tick_count, 120u);
  EXPECT_TRUE(check_constraints(g2, s2.y, p, Canvas{}).empty());
}
