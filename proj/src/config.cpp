#include "orcha/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace orcha {

StyleParams Config::effective_style() const {
  StyleParams style_copy = style;
  style_copy.seed = seed;
  return style_copy;
}

std::vector<std::string> Config::check() const {
  std::vector<std::string> out = force.check();
  for (auto& msg : style.check()) out.push_back(std::move(msg));
  if (!(graph.step > 0.0)) out.emplace_back("step must be positive");
  if (!(graph.width > 0.0 && graph.height > 0.0)) out.emplace_back("canvas must have positive size");
  if (!(graph.default_size > 0.0 && graph.unit_px > 0.0)) {
    out.emplace_back("default size and unit must be positive");
  }
  if (!(relayout.reheat_alpha > 0.0 && relayout.reheat_alpha < force.alpha_start)) {
    out.emplace_back("reheat alpha must lie in (0, alpha_start)");
  }
  return out;
}

nlohmann::json to_json(const Config& c) {
  nlohmann::json style;
  to_json(style, c.style);
  style.erase("seed");
  return {
      {"canvas", {{"width", c.graph.width}, {"height", c.graph.height}}},
      {"step", c.graph.step},
      {"margin", c.graph.margin},
      {"defaultSize", c.graph.default_size},
      {"unitPx", c.graph.unit_px},
      {"baseFontPx", c.graph.base_font_px},
      {"glyphWidthEm", c.graph.glyph_width_em},
      {"labelPaddingEm", c.graph.label_padding_em},
      {"anchorFraction", c.graph.anchor_fraction},
      {"linkWidthPx", c.graph.link_width_px},
      {"force",
       {{"gravity", c.force.gravity},
        {"repulsionStrength", c.force.repulsion_strength},
        {"repulsionCutoff", c.force.repulsion_cutoff},
        {"repulsionMinDistance", c.force.repulsion_min_distance},
        {"stiffness",
         {{"stream", c.force.stiffness.stream},
          {"label", c.force.stiffness.label},
          {"link", c.force.stiffness.link}}},
        {"springRestLength", c.force.spring_rest_length},
        {"velocityDecay", c.force.velocity_decay},
        {"alphaStart", c.force.alpha_start},
        {"alphaDecay", c.force.alpha_decay},
        {"alphaMin", c.force.alpha_min},
        {"maxTicks", c.force.max_ticks},
        {"padding", c.force.padding}}},
      {"style", style},
      {"relayout", {{"reheatAlpha", c.relayout.reheat_alpha}, {"maxTicks", c.relayout.max_ticks}}},
      {"seed", c.seed},
  };
}

Config config_from_json(const nlohmann::json& j, Config c) {
  if (const auto it = j.find("canvas"); it != j.end()) {
    c.graph.width = it->value("width", c.graph.width);
    c.graph.height = it->value("height", c.graph.height);
  }
  c.graph.step = j.value("step", c.graph.step);
  c.graph.margin = j.value("margin", c.graph.margin);
  c.graph.default_size = j.value("defaultSize", c.graph.default_size);
  c.graph.unit_px = j.value("unitPx", c.graph.unit_px);
  c.graph.base_font_px = j.value("baseFontPx", c.graph.base_font_px);
  c.graph.glyph_width_em = j.value("glyphWidthEm", c.graph.glyph_width_em);
  c.graph.label_padding_em = j.value("labelPaddingEm", c.graph.label_padding_em);
  c.graph.anchor_fraction = j.value("anchorFraction", c.graph.anchor_fraction);
  c.graph.link_width_px = j.value("linkWidthPx", c.graph.link_width_px);
  if (const auto f = j.find("force"); f != j.end()) {
    c.force.gravity = f->value("gravity", c.force.gravity);
    c.force.repulsion_strength = f->value("repulsionStrength", c.force.repulsion_strength);
    c.force.repulsion_cutoff = f->value("repulsionCutoff", c.force.repulsion_cutoff);
    c.force.repulsion_min_distance = f->value("repulsionMinDistance", c.force.repulsion_min_distance);
    if (const auto k = f->find("stiffness"); k != f->end()) {
      c.force.stiffness.stream = k->value("stream", c.force.stiffness.stream);
      c.force.stiffness.label = k->value("label", c.force.stiffness.label);
      c.force.stiffness.link = k->value("link", c.force.stiffness.link);
    }
    c.force.spring_rest_length = f->value("springRestLength", c.force.spring_rest_length);
    c.force.velocity_decay = f->value("velocityDecay", c.force.velocity_decay);
    c.force.alpha_start = f->value("alphaStart", c.force.alpha_start);
    c.force.alpha_decay = f->value("alphaDecay", c.force.alpha_decay);
    c.force.alpha_min = f->value("alphaMin", c.force.alpha_min);
    c.force.max_ticks = f->value("maxTicks", c.force.max_ticks);
    c.force.padding = f->value("padding", c.force.padding);
  }
  if (const auto s = j.find("style"); s != j.end()) {
    from_json(*s, c.style);
    if (s->contains("seed")) c.seed = c.style.seed;
  }
  if (const auto r = j.find("relayout"); r != j.end()) {
    c.relayout.reheat_alpha = r->value("reheatAlpha", c.relayout.reheat_alpha);
    c.relayout.max_ticks = r->value("maxTicks", c.relayout.max_ticks);
  }
  c.seed = j.value("seed", c.seed);
  return c;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  return config_from_json(nlohmann::json::parse(in), std::move(base));
}

void apply_seed_env(Config& config) {
  const char* value = std::getenv("ORCHA_SEED");
  if (value == nullptr || *value == '\0') return;
  std::uint64_t seed = 0;
  const std::string_view text(value);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("ORCHA_SEED must be an unsigned integer, got '" + std::string(text) + "'");
  }
  config.seed = seed;
}

}  // namespace orcha
