#pragma once

#include <memory>

#include "orcha/chart_model.hpp"
#include "orcha/config.hpp"
#include "orcha/geometry.hpp"
#include "orcha/graph.hpp"
#include "orcha/layout.hpp"
#include "orcha/svg.hpp"

namespace orcha {

/// A laid-out chart. The graph is shared so snapshots stay cheap to copy.
struct ChartLayout {
  std::shared_ptr<const LayoutGraph> graph;
  SimulationState state;
};

/// Builds the graph and runs the full simulation from stacked positions.
ChartLayout layout_chart(const ChartSpec& spec, const Config& config);

SceneModel chart_scene(const ChartSpec& spec, const ChartLayout& layout, const Config& config);

/// The single rendering path shared by the CLI and the service.
SvgDocument render_svg(const ChartSpec& spec, const ChartLayout& layout, const Config& config);

}  // namespace orcha
