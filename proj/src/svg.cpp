#include "orcha/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "orcha/font_metrics.hpp"

namespace orcha {
namespace {

constexpr std::string_view kFontFamily = "Helvetica, Arial, sans-serif";
constexpr double kAxisFontPx = 10.0;

std::string fixed(double value, int precision) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
  std::string out(buf, ptr);
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

std::string attr(std::string_view name, std::string_view value) {
  std::string out = " ";
  out += name;
  out += "=\"";
  out += value;
  out += '"';
  return out;
}

std::string attr(std::string_view name, double value) { return attr(name, fixed2(value)); }

std::string filter_ref(const StyleParams& style, std::string_view cls) {
  if (!style.effects) return "";
  return attr("filter", "url(#orcha-style-" + std::string(cls) + ")");
}

std::string one_filter(const StyleParams& style, std::string_view cls) {
  const double c = style.noise.contrast;
  // gray = (1 - c) + c * luminance(noise); c = 0 gives a constant 1.
  const std::string grain_row = fixed(0.2126 * c, 4) + " " + fixed(0.7152 * c, 4) + " " +
                                fixed(0.0722 * c, 4) + " 0 " + fixed(1.0 - c, 4);
  const std::string grain = grain_row + "  " + grain_row + "  " + grain_row + "  0 0 0 0 1";
  const std::string tone = "0 0 0 0 0  0 0 0 0 0  0 0 0 0 0  0 0 0 " +
                           fixed(style.shadow.opacity, 4) + " 0";

  std::string out = "<filter";
  out += attr("id", "orcha-style-" + std::string(cls));
  out += attr("filterUnits", "userSpaceOnUse");
  out += attr("x", "-10%") + attr("y", "-10%") + attr("width", "120%") + attr("height", "120%");
  out += attr("color-interpolation-filters", "sRGB");
  out += ">\n";
  out += "<feTurbulence" + attr("type", "fractalNoise") +
         attr("baseFrequency", fixed(style.noise.base_frequency, 4)) +
         attr("numOctaves", std::to_string(style.noise.octaves)) +
         attr("seed", std::to_string(style.seed % 100000)) + attr("result", "noise") + "/>\n";
  out += "<feColorMatrix" + attr("in", "noise") + attr("type", "matrix") + attr("values", grain) +
         attr("result", "grain") + "/>\n";
  out += "<feBlend" + attr("in", "SourceGraphic") + attr("in2", "grain") + attr("mode", "multiply") +
         attr("result", "textured") + "/>\n";
  out += "<feComposite" + attr("in", "textured") + attr("in2", "SourceAlpha") +
         attr("operator", "in") + attr("result", "body") + "/>\n";
  out += "<feOffset" + attr("in", "SourceAlpha") + attr("dx", style.shadow.dx) +
         attr("dy", style.shadow.dy) + attr("result", "offset") + "/>\n";
  out += "<feGaussianBlur" + attr("in", "offset") + attr("stdDeviation", style.shadow.blur) +
         attr("result", "offsetBlur") + "/>\n";
  out += "<feColorMatrix" + attr("in", "offsetBlur") + attr("type", "matrix") + attr("values", tone) +
         attr("result", "shadowTone") + "/>\n";
  out += "<feComposite" + attr("in", "shadowTone") + attr("in2", "SourceAlpha") +
         attr("operator", "in") + attr("result", "innerShadow") + "/>\n";
  out += "<feComposite" + attr("in", "innerShadow") + attr("in2", "body") + attr("operator", "over") +
         attr("result", "shaded") + "/>\n";
  out += "<feComposite" + attr("in", "shadowTone") + attr("in2", "SourceAlpha") +
         attr("operator", "out") + attr("result", "outerShadow") + "/>\n";
  out += "<feMerge>" "<feMergeNode" + attr("in", "outerShadow") + "/>" "<feMergeNode" +
         attr("in", "shaded") + "/>" "</feMerge>\n";
  out += "</filter>\n";
  return out;
}

double saturation(const std::string& color) {
  const auto rgb = parse_color(color);
  return rgb ? to_hsl(*rgb).s : 0.0;
}

std::string rect(double x, double y, double w, double h, const std::string& fill,
                 std::string_view cls) {
  return "<rect" + attr("class", cls) + attr("x", x) + attr("y", y) + attr("width", w) +
         attr("height", h) + attr("fill", fill) + "/>\n";
}

}  // namespace

std::string fixed2(double value) { return fixed(value, 2); }

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string path_data(const Path& path) {
  if (path.empty()) return "";
  auto pt = [](Point p) { return fixed2(p.x) + " " + fixed2(p.y); };
  std::string d = "M" + pt(path.segments.front().p0);
  for (const auto& s : path.segments) d += " C" + pt(s.c1) + " " + pt(s.c2) + " " + pt(s.p1);
  if (path.closed) d += " Z";
  return d;
}

std::vector<std::string> StyleParams::check() const {
  std::vector<std::string> out;
  if (!(shadow.dx < 0.0 && shadow.dy > 0.0)) {
    out.emplace_back("shadow offset must point down-left (dx < 0, dy > 0)");
  }
  if (shadow.blur < 0.0 || outline_width < 0.0) out.emplace_back("widths must be non-negative");
  if (noise.contrast < 0.0 || noise.contrast > 1.0) out.emplace_back("noise contrast must lie in [0, 1]");
  if (noise.octaves < 1) out.emplace_back("noise needs at least one octave");
  if (axis.step < 0.0 || background.step < 0.0) out.emplace_back("block steps must be non-negative");
  for (const auto* lane : {&axis, &background}) {
    for (const auto& c : lane->colors) {
      if (!parse_color(c)) out.push_back("unknown block color '" + c + "'");
    }
  }
  const double axis_sat = std::min(saturation(axis.colors[0]), saturation(axis.colors[1]));
  const double back_sat = std::max(saturation(background.colors[0]), saturation(background.colors[1]));
  if (axis_sat < back_sat) out.emplace_back("axis colors must be at least as saturated as background colors");
  return out;
}

void to_json(nlohmann::json& j, const StyleParams& s) {
  j = nlohmann::json{
      {"noise", {{"baseFrequency", s.noise.base_frequency}, {"octaves", s.noise.octaves},
                 {"contrast", s.noise.contrast}}},
      {"outlineWidth", s.outline_width},
      {"shadow", {{"dx", s.shadow.dx}, {"dy", s.shadow.dy}, {"blur", s.shadow.blur},
                  {"opacity", s.shadow.opacity}}},
      {"axis", {{"step", s.axis.step}, {"colors", s.axis.colors}, {"height", s.axis.height}}},
      {"background", {{"step", s.background.step}, {"colors", s.background.colors}}},
      {"seed", s.seed},
      {"effects", s.effects},
  };
}

void from_json(const nlohmann::json& j, StyleParams& s) {
  if (const auto it = j.find("noise"); it != j.end()) {
    s.noise.base_frequency = it->value("baseFrequency", s.noise.base_frequency);
    s.noise.octaves = it->value("octaves", s.noise.octaves);
    s.noise.contrast = it->value("contrast", s.noise.contrast);
  }
  s.outline_width = j.value("outlineWidth", s.outline_width);
  if (const auto it = j.find("shadow"); it != j.end()) {
    s.shadow.dx = it->value("dx", s.shadow.dx);
    s.shadow.dy = it->value("dy", s.shadow.dy);
    s.shadow.blur = it->value("blur", s.shadow.blur);
    s.shadow.opacity = it->value("opacity", s.shadow.opacity);
  }
  for (auto [key, lane] : {std::pair{"axis", &s.axis}, std::pair{"background", &s.background}}) {
    const auto it = j.find(key);
    if (it == j.end()) continue;
    lane->step = it->value("step", lane->step);
    lane->height = it->value("height", lane->height);
    if (const auto colors = it->find("colors"); colors != it->end()) {
      lane->colors = colors->get<std::array<std::string, 2>>();
    }
  }
  s.seed = j.value("seed", s.seed);
  s.effects = j.value("effects", s.effects);
}

std::vector<AxisBlock> axis_blocks(Time t_start, Time t_end, Time step,
                                   const std::array<std::string, 2>& colors) {
  std::vector<AxisBlock> out;
  if (!(step > 0.0) || t_end < t_start) return out;
  const Time eps = 1e-9 * step;
  for (std::size_t i = 0;; ++i) {
    const Time t0 = t_start + static_cast<Time>(i) * step;
    if (i > 0 && t0 >= t_end - eps) break;
    const Time t1 = std::min(t0 + step, t_end);
    out.push_back({t0, t1, colors[i % 2]});
    if (t1 >= t_end) break;
  }
  return out;
}

Time auto_block_step(Time range, std::size_t target_blocks) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / static_cast<double>(std::max<std::size_t>(target_blocks, 1));
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * magnitude >= raw) return m * magnitude;
  }
  return 10.0 * magnitude;
}

std::string filter_defs(const StyleParams& style) {
  std::string out;
  for (std::string_view cls : {"stream", "link", "label"}) out += one_filter(style, cls);
  return out;
}

SvgDocument emit_svg(const SceneModel& scene, const StyleParams& style) {
  SvgDocument doc;
  const double w = scene.canvas.width;
  const double h = scene.canvas.height;
  doc.width = w;
  doc.height = h + style.axis.height;

  const Time t_min = scene.axis.t_min;
  const Time t_max = scene.axis.t_max;
  const double x_start = scene.axis.to_px(t_min);
  const double x_end = scene.axis.to_px(t_max);
  const Time range = t_max - t_min;
  const double outline = style.outline_width;

  std::string& s = doc.text;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg" + attr("xmlns", "http://www.w3.org/2000/svg") +
       attr("xmlns:xlink", "http://www.w3.org/1999/xlink") + attr("version", "1.1") +
       attr("width", doc.width) + attr("height", doc.height) +
       attr("viewBox", "0 0 " + fixed2(doc.width) + " " + fixed2(doc.height)) + ">\n";

  s += "<defs>\n";
  if (style.effects) s += filter_defs(style);
  const bool arrows = std::any_of(scene.links.begin(), scene.links.end(),
                                  [](const LinkPath& l) { return l.style == LinkStyle::arrow; });
  if (arrows) {
    s += "<marker" + attr("id", "orcha-arrow") + attr("viewBox", "0 0 10 10") + attr("refX", "9") +
         attr("refY", "5") + attr("markerWidth", "6") + attr("markerHeight", "6") +
         attr("orient", "auto") + "><path" + attr("d", "M0 0 L10 5 L0 10 Z") +
         attr("fill", "#000000") + "/></marker>\n";
  }
  for (const auto& label : scene.labels) {
    if (label.type != LabelType::on || label.baseline.empty()) continue;
    s += "<path" + attr("id", "orcha-baseline-" + std::to_string(label.label_index)) +
         attr("d", path_data(label.baseline)) + attr("fill", "none") + "/>\n";
  }
  s += "</defs>\n";

  s += "<g" + attr("id", "background") + ">\n";
  s += rect(0.0, 0.0, w, h, style.background.colors[1], "background-fill");
  const Time back_step = style.background.step > 0.0 ? style.background.step : auto_block_step(range, 6);
  for (const auto& b : axis_blocks(t_min, t_max, back_step, style.background.colors)) {
    const double x0 = scene.axis.to_px(b.t0);
    s += rect(x0, 0.0, scene.axis.to_px(b.t1) - x0, h, b.color, "background-block");
  }
  s += "</g>\n";

  s += "<g" + attr("id", "streams") + ">\n";
  for (const auto& sp : scene.streams) {
    s += "<path" + attr("class", "stream") + attr("data-stream", xml_escape(sp.id)) +
         attr("data-depth", std::to_string(sp.depth)) + attr("d", path_data(sp.outline)) +
         attr("fill", to_hex(sp.fill)) + attr("stroke", "#000000") + attr("stroke-width", outline) +
         attr("stroke-linejoin", "round") + filter_ref(style, "stream") + "/>\n";
  }
  s += "</g>\n";

  s += "<g" + attr("id", "links") + ">\n";
  for (const auto& link : scene.links) {
    const std::string idx = std::to_string(link.link_index);
    if (link.style == LinkStyle::ribbon) {
      if (link.ribbon.empty()) continue;
      s += "<path" + attr("class", link.merge ? "link link-merge" : "link") + attr("data-link", idx) +
           attr("d", path_data(link.ribbon)) + attr("fill", to_hex(link.fill)) +
           attr("stroke", "#000000") + attr("stroke-width", outline / 2.0) +
           filter_ref(style, "link") + "/>\n";
    } else {
      if (link.centerline.empty()) continue;
      s += "<path" + attr("class", "link link-line") + attr("data-link", idx) +
           attr("d", path_data(link.centerline)) + attr("fill", "none") + attr("stroke", "#000000") +
           attr("stroke-width", 1.5) +
           (link.style == LinkStyle::arrow ? attr("marker-end", "url(#orcha-arrow)") : "") + "/>\n";
    }
  }
  for (const auto& anchor : scene.anchors) {
    s += "<path" + attr("class", "link-anchor") + attr("data-link", std::to_string(anchor.link_index)) +
         attr("d", path_data(anchor.outline)) + attr("fill", to_hex(anchor.fill)) +
         attr("stroke", "#000000") + attr("stroke-width", outline / 2.0) +
         filter_ref(style, "link") + "/>\n";
  }
  s += "</g>\n";

  s += "<g" + attr("id", "labels") + ">\n";
  for (const auto& label : scene.labels) {
    if (label.empty()) continue;
    s += "<g" + attr("class", "label label-" + std::string(to_string(label.type))) +
         attr("data-label", std::to_string(label.label_index)) + ">\n";
    const std::string font = attr("font-family", kFontFamily) + attr("font-size", label.font_px) +
                             attr("fill", "#000000");
    if (label.connector) {
      s += "<path" + attr("class", "label-connector") +
           attr("d", "M" + fixed2(label.connector->first.x) + " " + fixed2(label.connector->first.y) +
                         " L" + fixed2(label.connector->second.x) + " " +
                         fixed2(label.connector->second.y)) +
           attr("fill", "none") + attr("stroke", to_hex(label.stroke)) +
           attr("stroke-width", outline) + "/>\n";
    }
    if (label.has_box) {
      const Point c = label.box_center;
      if (label.shape == LabelShape::ellipse) {
        s += "<ellipse" + attr("class", "label-box") + attr("cx", c.x) + attr("cy", c.y) +
             attr("rx", label.box_width / 2.0 * std::numbers::sqrt2) +
             attr("ry", label.box_height / 2.0 * std::numbers::sqrt2);
      } else {
        s += "<rect" + attr("class", "label-box") + attr("x", c.x - label.box_width / 2.0) +
             attr("y", c.y - label.box_height / 2.0) + attr("width", label.box_width) +
             attr("height", label.box_height) + attr("rx", 3.0);
      }
      s += attr("fill", to_hex(label.box_fill)) + attr("stroke", "#000000") +
           attr("stroke-width", outline / 2.0) + filter_ref(style, "label") + "/>\n";
      s += "<text" + attr("x", c.x) + attr("y", c.y + 0.35 * label.font_px) +
           attr("text-anchor", "middle") + font + ">" + xml_escape(to_upper(label.text)) +
           "</text>\n";
    } else {
      s += "<text" + font + "><textPath" +
           attr("xlink:href", "#orcha-baseline-" + std::to_string(label.label_index)) +
           attr("startOffset", "50%") + attr("text-anchor", "middle") + ">" +
           xml_escape(to_upper(label.text)) + "</textPath></text>\n";
    }
    s += "</g>\n";
  }
  s += "</g>\n";

  s += "<g" + attr("id", "axis") + ">\n";
  s += rect(0.0, h, w, style.axis.height, "#FFFFFF", "axis-strip");
  const Time axis_step = style.axis.step > 0.0 ? style.axis.step : auto_block_step(range);
  for (const auto& b : axis_blocks(t_min, t_max, axis_step, style.axis.colors)) {
    const double x0 = scene.axis.to_px(b.t0);
    s += rect(x0, h, scene.axis.to_px(b.t1) - x0, style.axis.height, b.color, "axis-block");
    s += "<text" + attr("class", "axis-label") + attr("x", x0 + 3.0) +
         attr("y", h + style.axis.height / 2.0 + 0.35 * kAxisFontPx) +
         attr("font-family", kFontFamily) + attr("font-size", kAxisFontPx) +
         attr("fill", "#000000") + ">" + xml_escape(format_number(b.t0)) + "</text>\n";
  }
  s += "<path" + attr("class", "axis-outline") +
       attr("d", "M" + fixed2(x_start) + " " + fixed2(h) + " L" + fixed2(x_end) + " " + fixed2(h)) +
       attr("stroke", "#000000") + attr("stroke-width", outline) + attr("fill", "none") + "/>\n";
  s += "</g>\n";
  s += "</svg>\n";
  return doc;
}

}  // namespace orcha
