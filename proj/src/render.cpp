#include "orcha/render.hpp"

namespace orcha {

ChartLayout layout_chart(const ChartSpec& spec, const Config& config) {
  ChartLayout out;
  out.graph = std::make_shared<const LayoutGraph>(build_graph(spec, config.graph));
  out.state = init_positions(*out.graph, config.force, config.canvas(), config.seed);
  ForceSimulation(*out.graph, config.force, config.canvas()).run(out.state);
  return out;
}

SceneModel chart_scene(const ChartSpec& spec, const ChartLayout& layout, const Config& config) {
  return build_scene(spec, *layout.graph, layout.state.y, config.graph);
}

SvgDocument render_svg(const ChartSpec& spec, const ChartLayout& layout, const Config& config) {
  return emit_svg(chart_scene(spec, layout, config), config.effective_style());
}

}  // namespace orcha
