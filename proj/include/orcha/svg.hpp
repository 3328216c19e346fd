#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "orcha/geometry.hpp"

namespace orcha {

struct NoiseParams {
  double base_frequency = 0.02;  // 1/px
  int octaves = 4;
  double contrast = 0.35;  // 0 disables the grain
};

struct ShadowParams {
  double dx = -3.0;
  double dy = 3.0;
  double blur = 2.0;
  double opacity = 0.45;
};

/// Alternating-color block lane. A step of 0 picks a round step that gives
/// roughly a dozen blocks over the chart's time range.
struct BlockLane {
  double step = 0.0;
  std::array<std::string, 2> colors;
  double height = 0.0;  // axis strip only
};

struct StyleParams {
  NoiseParams noise;
  double outline_width = 2.5;
  ShadowParams shadow;
  BlockLane axis{0.0, {"#E8A33D", "#3E7CB8"}, 28.0};
  BlockLane background{0.0, {"#F3EEE4", "#E6E9EC"}, 0.0};
  std::uint64_t seed = 0;
  bool effects = true;  // false: flat fills and outlines only

  /// Rule violations: shadow must point down-left, axis colors at least as
  /// saturated as background colors, positive sizes.
  std::vector<std::string> check() const;
};

void to_json(nlohmann::json& j, const StyleParams& style);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, StyleParams& style);

enum class BlockLaneKind { axis, background };

struct AxisBlock {
  Time t0 = 0.0;
  Time t1 = 0.0;
  std::string color;
};

/// Tiles [t_start, t_end] from t_start with blocks of `step`; the last block
/// is clipped to t_end. Colors alternate starting with colors[0].
std::vector<AxisBlock> axis_blocks(Time t_start, Time t_end, Time step,
                                   const std::array<std::string, 2>& colors);

/// Round block step (1, 2 or 5 times a power of ten) for a time range.
Time auto_block_step(Time range, std::size_t target_blocks = 12);

/// `<filter>` elements for the stream, link and label classes:
/// grain multiply, inner shadow, outer shadow.
std::string filter_defs(const StyleParams& style);

struct SvgDocument {
  std::string text;
  double width = 0.0;
  double height = 0.0;
};

/// Layers: background blocks, streams, links, labels, axis strip. Numbers are
/// written with two decimals so equal inputs give equal bytes.
SvgDocument emit_svg(const SceneModel& scene, const StyleParams& style);

/// Fixed two-decimal rendering used for every coordinate.
std::string fixed2(double value);

std::string path_data(const Path& path);

std::string xml_escape(std::string_view text);

}  // namespace orcha
