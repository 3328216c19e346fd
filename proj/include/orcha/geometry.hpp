#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orcha/chart_model.hpp"
#include "orcha/color.hpp"
#include "orcha/graph.hpp"
#include "orcha/layout.hpp"

namespace orcha {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct CubicSegment {
  Point p0;
  Point c1;
  Point c2;
  Point p1;

  Point at(double u) const;
  Point derivative(double u) const;
  CubicSegment reversed() const { return {p1, c2, c1, p0}; }
};

/// Connected run of cubic segments; each segment starts where the previous
/// one ended. Closed paths return to the first point.
struct Path {
  std::vector<CubicSegment> segments;
  bool closed = false;

  bool empty() const { return segments.empty(); }
  /// `samples_per_segment` points per segment plus the final endpoint.
  std::vector<Point> sample(std::size_t samples_per_segment = 32) const;
};

/// Horizontal-tangent cubic between two nodes: both control points sit at
/// the horizontal midpoint, level with their own endpoint.
CubicSegment bezier_segment(Point p0, Point p1);

/// Straight segment expressed as a cubic.
CubicSegment line_segment(Point a, Point b);

/// Rounded rectangle centered at `center`; corner radius min(w, h) / 2.
Path capsule(Point center, double width, double height);

/// Closed band through (x, y - size/2) on top and (x, y + size/2) on the
/// bottom of every node. A single node becomes a capsule `cap_width` wide.
Path stream_outline(std::span<const Point> centers, std::span<const double> sizes,
                    double cap_width);

/// Smooth open curve through the points using bezier_segment.
Path smooth_polyline(std::span<const Point> points);

struct StreamPath {
  std::size_t stream_index = 0;
  std::string id;
  Path outline;
  int depth = 0;
  Rgb fill;
};

struct LinkPath {
  std::size_t link_index = 0;
  LinkStyle style = LinkStyle::ribbon;
  bool merge = false;
  Path ribbon;      // filled band (ribbon style)
  Path centerline;  // stroked curve (line and arrow styles)
  Rgb fill;
};

struct AnchorShape {
  std::size_t link_index = 0;
  Path outline;
  Rgb fill;
};

struct GlyphPlacement {
  std::string glyph;  // one code point, UTF-8
  Point position;     // glyph center on the baseline
  double angle_deg = 0.0;
};

struct LabelGeometry {
  std::size_t label_index = 0;
  LabelType type = LabelType::in;
  LabelShape shape = LabelShape::ellipse;
  std::string text;  // upper-cased as rendered
  double font_px = 0.0;
  bool has_box = false;
  Point box_center;
  double box_width = 0.0;   // padded text extent; ellipses circumscribe it
  double box_height = 0.0;
  Rgb box_fill;
  Rgb stroke;  // color of the owning stream
  std::optional<std::pair<Point, Point>> connector;  // box edge -> stream outline
  Path baseline;  // on-top labels only
  std::vector<GlyphPlacement> glyphs;

  bool empty() const { return text.empty(); }
};

/// Everything the SVG writer paints, already in paint order within each list:
/// streams outer-to-inner by depth, then links, anchors and labels.
struct SceneModel {
  Canvas canvas;
  TimeAxis axis;
  std::vector<StreamPath> streams;
  std::vector<LinkPath> links;
  std::vector<AnchorShape> anchors;
  std::vector<LabelGeometry> labels;
};

struct LabelStyle {
  double base_font_px = 10.0;
  double padding_em = 0.4;
  std::size_t arc_samples = 32;
};

/// Box (in/out), connector (out) or curved baseline with glyphs (on).
/// `chain` holds the positioned label nodes left to right. Inside labels
/// shrink their font until the box's vertical extent fits `max_extent`.
LabelGeometry label_geometry(const LabelDef& label, std::size_t label_index,
                             std::span<const Point> chain, const StreamPath& stream,
                             const Rgb& stream_color, const LabelStyle& style,
                             double max_extent = INFINITY);

/// Ribbon (or center line) along the link's node chain. Ribbons keep
/// `width` except that merge ribbons widen over the last segment to
/// `end_size`, the target stream's thickness.
LinkPath link_path(const LinkDef& link, std::size_t link_index, std::span<const Point> chain,
                   double width, double end_size, const Rgb& color);

/// Resolves the whole chart at the given node positions.
SceneModel build_scene(const ChartSpec& spec, const LayoutGraph& graph,
                       const std::vector<double>& y, const GraphParams& params);

/// Closest point of the sampled path to `p`.
Point nearest_point(const Path& path, Point p, std::size_t samples_per_segment = 32);

double distance(Point a, Point b);

}  // namespace orcha
