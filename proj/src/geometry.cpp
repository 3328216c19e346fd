#include "orcha/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orcha/font_metrics.hpp"

namespace orcha {
namespace {

// Cubic handle length for a quarter circle.
constexpr double kArc = 0.5522847498307936;

Point lerp(Point a, Point b, double u) { return {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u}; }

// Arc-length table over a sampled polyline.
class ArcLength {
 public:
  explicit ArcLength(std::vector<Point> points) : points_(std::move(points)) {
    lengths_.push_back(0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      lengths_.push_back(lengths_.back() + distance(points_[i - 1], points_[i]));
    }
  }

  double total() const { return lengths_.back(); }

  // Point and tangent angle at arc length s, clamped to the curve.
  std::pair<Point, double> at(double s) const {
    if (points_.size() < 2) return {points_.empty() ? Point{} : points_.front(), 0.0};
    s = std::clamp(s, 0.0, total());
    auto it = std::upper_bound(lengths_.begin(), lengths_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - lengths_.begin());
    i = std::clamp<std::size_t>(i, 1, points_.size() - 1);
    const double span = lengths_[i] - lengths_[i - 1];
    const double u = span > 0.0 ? (s - lengths_[i - 1]) / span : 0.0;
    const Point a = points_[i - 1];
    const Point b = points_[i];
    const double angle = std::atan2(b.y - a.y, b.x - a.x) * 180.0 / std::numbers::pi;
    return {lerp(a, b, u), angle};
  }

 private:
  std::vector<Point> points_;
  std::vector<double> lengths_;
};

Point add(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point CubicSegment::at(double u) const {
  const double v = 1.0 - u;
  const double b0 = v * v * v;
  const double b1 = 3.0 * v * v * u;
  const double b2 = 3.0 * v * u * u;
  const double b3 = u * u * u;
  return {b0 * p0.x + b1 * c1.x + b2 * c2.x + b3 * p1.x,
          b0 * p0.y + b1 * c1.y + b2 * c2.y + b3 * p1.y};
}

Point CubicSegment::derivative(double u) const {
  const double v = 1.0 - u;
  const double d0 = 3.0 * v * v;
  const double d1 = 6.0 * v * u;
  const double d2 = 3.0 * u * u;
  return {d0 * (c1.x - p0.x) + d1 * (c2.x - c1.x) + d2 * (p1.x - c2.x),
          d0 * (c1.y - p0.y) + d1 * (c2.y - c1.y) + d2 * (p1.y - c2.y)};
}

std::vector<Point> Path::sample(std::size_t samples_per_segment) const {
  std::vector<Point> out;
  if (segments.empty()) return out;
  const std::size_t n = std::max<std::size_t>(samples_per_segment, 1);
  out.reserve(segments.size() * n + 1);
  for (const auto& seg : segments) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(seg.at(static_cast<double>(i) / n));
  }
  out.push_back(segments.back().p1);
  return out;
}

CubicSegment bezier_segment(Point p0, Point p1) {
  const double half = (p1.x - p0.x) / 2.0;
  return {p0, {p0.x + half, p0.y}, {p1.x - half, p1.y}, p1};
}

CubicSegment line_segment(Point a, Point b) {
  return {a, lerp(a, b, 1.0 / 3.0), lerp(a, b, 2.0 / 3.0), b};
}

Path capsule(Point center, double width, double height) {
  const double hw = width / 2.0;
  const double hh = height / 2.0;
  const double r = std::min(hw, hh);
  const double k = kArc * r;
  const double left = center.x - hw;
  const double right = center.x + hw;
  const double top = center.y - hh;
  const double bottom = center.y + hh;

  Path path;
  path.closed = true;
  auto& s = path.segments;
  const Point top_left{left + r, top};
  const Point top_right{right - r, top};
  s.push_back(line_segment(top_left, top_right));
  s.push_back({top_right, {right - r + k, top}, {right, top + r - k}, {right, top + r}});
  s.push_back(line_segment({right, top + r}, {right, bottom - r}));
  s.push_back({{right, bottom - r}, {right, bottom - r + k}, {right - r + k, bottom}, {right - r, bottom}});
  s.push_back(line_segment({right - r, bottom}, {left + r, bottom}));
  s.push_back({{left + r, bottom}, {left + r - k, bottom}, {left, bottom - r + k}, {left, bottom - r}});
  s.push_back(line_segment({left, bottom - r}, {left, top + r}));
  s.push_back({{left, top + r}, {left, top + r - k}, {left + r - k, top}, top_left});
  return path;
}

Path stream_outline(std::span<const Point> centers, std::span<const double> sizes,
                    double cap_width) {
  Path path;
  if (centers.empty()) return path;
  if (centers.size() == 1) return capsule(centers.front(), cap_width, sizes.front());

  std::vector<Point> top;
  std::vector<Point> bottom;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    top.push_back({centers[i].x, centers[i].y - sizes[i] / 2.0});
    bottom.push_back({centers[i].x, centers[i].y + sizes[i] / 2.0});
  }
  path.closed = true;
  for (std::size_t i = 1; i < top.size(); ++i) path.segments.push_back(bezier_segment(top[i - 1], top[i]));
  path.segments.push_back(line_segment(top.back(), bottom.back()));
  for (std::size_t i = bottom.size() - 1; i >= 1; --i) {
    path.segments.push_back(bezier_segment(bottom[i - 1], bottom[i]).reversed());
  }
  path.segments.push_back(line_segment(bottom.front(), top.front()));
  return path;
}

Path smooth_polyline(std::span<const Point> points) {
  Path path;
  for (std::size_t i = 1; i < points.size(); ++i) {
    path.segments.push_back(bezier_segment(points[i - 1], points[i]));
  }
  return path;
}

Point nearest_point(const Path& path, Point p, std::size_t samples_per_segment) {
  const auto samples = path.sample(samples_per_segment);
  Point best = samples.empty() ? p : samples.front();
  double best_d = distance(best, p);
  for (const auto& s : samples) {
    const double d = distance(s, p);
    if (d < best_d) {
      best = s;
      best_d = d;
    }
  }
  return best;
}

LabelGeometry label_geometry(const LabelDef& label, std::size_t label_index,
                             std::span<const Point> chain, const StreamPath& stream,
                             const Rgb& stream_color, const LabelStyle& style,
                             double max_extent) {
  LabelGeometry g;
  g.label_index = label_index;
  g.type = label.type;
  g.shape = label.shape;
  g.stroke = stream_color;
  if (label.text.empty() || chain.empty()) return g;

  g.text = to_upper(label.text);
  g.font_px = label.size * style.base_font_px;
  if (label.type == LabelType::in) {
    const double per_px = (1.0 + 2.0 * style.padding_em) *
                          (label.shape == LabelShape::ellipse ? std::numbers::sqrt2 : 1.0);
    g.font_px = std::min(g.font_px, max_extent / per_px);
  }
  const double text_w = text_width_px(g.text, g.font_px);
  const double pad = style.padding_em * g.font_px;

  if (label.type == LabelType::on) {
    // Baseline sits below the chain so the glyphs straddle the stream center.
    const double drop = 0.35 * g.font_px;
    std::vector<Point> pts;
    for (const auto& c : chain) pts.push_back({c.x, c.y + drop});
    double length = 0.0;
    if (pts.size() > 1) length = ArcLength(smooth_polyline(pts).sample(style.arc_samples)).total();
    const double needed = text_w + 2.0 * pad;
    if (length < needed) {
      const double extend = (needed - length) / 2.0;
      pts.insert(pts.begin(), Point{pts.front().x - extend, pts.front().y});
      pts.push_back({pts.back().x + extend, pts.back().y});
    }
    g.baseline = smooth_polyline(pts);
    const ArcLength arc(g.baseline.sample(style.arc_samples));
    double s = (arc.total() - text_w) / 2.0;
    for (char32_t cp : decode_utf8(g.text)) {
      const double advance = glyph_advance_em(cp) * g.font_px;
      const auto [pos, angle] = arc.at(s + advance / 2.0);
      g.glyphs.push_back({encode_utf8(cp), pos, angle});
      s += advance;
    }
    return g;
  }

  Point centroid;
  for (const auto& c : chain) centroid = add(centroid, c);
  centroid = {centroid.x / static_cast<double>(chain.size()),
              centroid.y / static_cast<double>(chain.size())};
  g.has_box = true;
  g.box_center = centroid;
  g.box_width = text_w + 2.0 * pad;
  g.box_height = g.font_px + 2.0 * pad;
  g.box_fill = nested_shade(stream_color, stream.depth + 1);

  if (label.type == LabelType::out && !stream.outline.empty()) {
    const Point attach = nearest_point(stream.outline, centroid, style.arc_samples);
    const double dx = attach.x - centroid.x;
    const double dy = attach.y - centroid.y;
    double scale = 1.0;
    const double hw = g.box_width / 2.0;
    const double hh = g.box_height / 2.0;
    if (dx != 0.0 || dy != 0.0) {
      if (label.shape == LabelShape::ellipse) {
        const double rx = hw * std::numbers::sqrt2;
        const double ry = hh * std::numbers::sqrt2;
        scale = 1.0 / std::sqrt((dx / rx) * (dx / rx) + (dy / ry) * (dy / ry));
      } else {
        scale = std::min(dx != 0.0 ? hw / std::abs(dx) : INFINITY,
                         dy != 0.0 ? hh / std::abs(dy) : INFINITY);
      }
    }
    const Point edge = scale < 1.0 ? Point{centroid.x + dx * scale, centroid.y + dy * scale} : attach;
    g.connector = std::make_pair(edge, attach);
  }
  return g;
}

LinkPath link_path(const LinkDef& link, std::size_t link_index, std::span<const Point> chain,
                   double width, double end_size, const Rgb& color) {
  LinkPath out;
  out.link_index = link_index;
  out.style = link.style;
  out.merge = link.merge;
  out.fill = color;
  if (chain.size() < 2) return out;
  if (link.style != LinkStyle::ribbon) {
    out.centerline = smooth_polyline(chain);
    return out;
  }
  std::vector<double> sizes(chain.size(), width);
  if (link.merge) sizes.back() = std::max(end_size, width);
  out.ribbon = stream_outline(chain, sizes, width);
  return out;
}

SceneModel build_scene(const ChartSpec& spec, const LayoutGraph& graph,
                       const std::vector<double>& y, const GraphParams& params) {
  SceneModel scene;
  scene.canvas = {params.width, params.height};
  scene.axis = graph.axis;
  const double px_step = params.step * graph.axis.px_per_time;

  auto point_of = [&](NodeId id) { return Point{graph.node(id).x, y[id.value]}; };

  std::vector<Rgb> colors(spec.streams.size());
  std::vector<std::size_t> path_of(spec.streams.size());
  for (std::size_t i = 0; i < spec.streams.size(); ++i) colors[i] = stream_color(spec, i);

  std::vector<std::size_t> order(spec.streams.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto depth_of = [&](std::size_t i) {
    const auto& chain = graph.stream_nodes[i];
    return chain.empty() ? 0 : graph.node(chain.front()).depth;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return depth_of(a) < depth_of(b); });
  for (std::size_t i : order) {
    std::vector<Point> centers;
    std::vector<double> sizes;
    for (NodeId id : graph.stream_nodes[i]) {
      centers.push_back(point_of(id));
      sizes.push_back(graph.node(id).size);
    }
    StreamPath sp;
    sp.stream_index = i;
    sp.id = spec.streams[i].id;
    sp.depth = depth_of(i);
    sp.fill = nested_shade(colors[i], sp.depth);
    sp.outline = stream_outline(centers, sizes, px_step);
    path_of[i] = scene.streams.size();
    scene.streams.push_back(std::move(sp));
  }

  for (std::size_t i = 0; i < spec.links.size(); ++i) {
    const auto& link = spec.links[i];
    const auto& chain = graph.link_chains[i];
    std::vector<Point> pts;
    for (NodeId id : chain.nodes) pts.push_back(point_of(id));
    const std::size_t from = *spec.stream_index(link.from);
    const double source_size = graph.node(chain.nodes.front()).size;
    const double width = std::min(params.link_width_px, source_size);
    const double end_size = graph.node(chain.nodes.back()).size;
    scene.links.push_back(link_path(link, i, pts, width, end_size, colors[from]));
    if (chain.anchor) {
      const Node& anchor = graph.node(*chain.anchor);
      const double w = std::max(anchor.size * 2.0, px_step / 2.0);
      scene.anchors.push_back({i, capsule(point_of(anchor.id), w, anchor.size), colors[from]});
    }
  }

  const LabelStyle label_style{params.base_font_px, params.label_padding_em, 32};
  for (std::size_t i = 0; i < spec.labels.size(); ++i) {
    const auto& label = spec.labels[i];
    const std::size_t s = *spec.stream_index(label.stream);
    std::vector<Point> pts;
    for (NodeId id : graph.label_chains[i].nodes) pts.push_back(point_of(id));
    const auto& chain = graph.label_chains[i];
    const Node& center = graph.node(chain.nodes[chain.center]);
    const double room = center.parent ? graph.node(*center.parent).size : INFINITY;
    scene.labels.push_back(
        label_geometry(label, i, pts, scene.streams[path_of[s]], colors[s], label_style, room));
  }
  return scene;
}

}  // namespace orcha
