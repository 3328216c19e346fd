#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "orcha/graph.hpp"
#include "orcha/layout.hpp"
#include "orcha/svg.hpp"

namespace orcha {

/// Budget for the warm-started layout that follows an edit.
struct RelayoutParams {
  double reheat_alpha = 0.3;
  std::size_t max_ticks = 120;
};

struct Config {
  GraphParams graph;
  ForceParams force;
  StyleParams style;
  RelayoutParams relayout;
  std::uint64_t seed = 42;  // feeds both the layout tie-breaks and the noise

  Canvas canvas() const { return {graph.width, graph.height}; }
  /// Style parameters with the shared seed applied.
  StyleParams effective_style() const;
  std::vector<std::string> check() const;
};

nlohmann::json to_json(const Config& config);
/// Overlays the keys present in `j` onto `base`.
Config config_from_json(const nlohmann::json& j, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

/// Applies ORCHA_SEED when set; throws std::invalid_argument if it is not an
/// unsigned integer.
void apply_seed_env(Config& config);

}  // namespace orcha
