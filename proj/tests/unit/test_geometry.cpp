#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "orcha/font_metrics.hpp"
#include "orcha/geometry.hpp"
#include "orcha/layout.hpp"
#include "orcha/synth.hpp"
#include "test_helpers.hpp"

using namespace orcha;

namespace {

void expect_point(Point actual, Point expected, double tol = 1e-9) {
  EXPECT_NEAR(actual.x, expected.x, tol);
  EXPECT_NEAR(actual.y, expected.y, tol);
}

StreamPath flat_stream(double y, double size) {
  const std::vector<Point> c{{0, y}, {100, y}, {200, y}};
  const std::vector<double> s(3, size);
  return {0, "S", stream_outline(c, s, 50), 0, Rgb{1, 0, 0}};
}

}  // namespace

TEST(Geometry, BezierControlPointsAtMidpoint) {
  const auto seg = bezier_segment({0, 0}, {10, 10});
  expect_point(seg.c1, {5, 0});
  expect_point(seg.c2, {5, 10});
  expect_point(seg.at(0.5), {5, 5});
}

TEST(Geometry, BezierEndsAreHorizontal) {
  for (auto [a, b] : {std::pair<Point, Point>{{0, 0}, {10, 10}}, {{3, -7}, {40, 2}}, {{-5, 9}, {1, 9}}}) {
    const auto seg = bezier_segment(a, b);
    EXPECT_EQ(seg.derivative(0).y, 0.0);
    EXPECT_EQ(seg.derivative(1).y, 0.0);
    EXPECT_GT(seg.derivative(0).x, 0.0);
    expect_point(seg.at(0), a);
    expect_point(seg.at(1), b);
  }
}

TEST(Geometry, StreamOutlineIsClosedBand) {
  const std::vector<Point> c{{0, 100}, {50, 120}, {100, 90}};
  const std::vector<double> s{10, 20, 10};
  const Path p = stream_outline(c, s, 40);
  ASSERT_TRUE(p.closed);
  // top (2) + right cap + bottom (2) + closing cap
  ASSERT_EQ(p.segments.size(), 6u);
  expect_point(p.segments.front().p0, {0, 95});
  expect_point(p.segments[1].p1, {100, 85});
  expect_point(p.segments[2].p1, {100, 95});
  expect_point(p.segments[3].p1, {50, 130});
  expect_point(p.segments.back().p1, p.segments.front().p0);
  for (std::size_t i = 1; i < p.segments.size(); ++i) {
    expect_point(p.segments[i].p0, p.segments[i - 1].p1);
  }
}

TEST(Geometry, SingleNodeStreamIsCapsule) {
  const std::vector<Point> c{{100, 50}};
  const std::vector<double> s{20};
  const Path p = stream_outline(c, s, 30);
  ASSERT_TRUE(p.closed);
  double min_x = INFINITY, max_x = -INFINITY, min_y = INFINITY, max_y = -INFINITY;
  for (Point q : p.sample(16)) {
    min_x = std::min(min_x, q.x);
    max_x = std::max(max_x, q.x);
    min_y = std::min(min_y, q.y);
    max_y = std::max(max_y, q.y);
  }
  EXPECT_NEAR(max_x - min_x, 30, 1e-9);
  EXPECT_NEAR(max_y - min_y, 20, 1e-6);
  EXPECT_NEAR((min_x + max_x) / 2, 100, 1e-9);
}

TEST(Geometry, SampleCountAndEndpoints) {
  const Path p = smooth_polyline(std::vector<Point>{{0, 0}, {10, 5}, {20, 0}});
  const auto pts = p.sample(8);
  EXPECT_EQ(pts.size(), 17u);
  expect_point(pts.front(), {0, 0});
  expect_point(pts.back(), {20, 0});
}

TEST(Geometry, NearestPointOnFlatBand) {
  const StreamPath s = flat_stream(100, 20);
  const Point q = nearest_point(s.outline, {100, 40});
  EXPECT_NEAR(q.y, 90, 1e-9);
  EXPECT_NEAR(q.x, 100, 100.0 / 32);
}

TEST(FontMetrics, HelveticaAdvances) {
  EXPECT_DOUBLE_EQ(glyph_advance_em(U'H'), 0.722);
  EXPECT_DOUBLE_EQ(glyph_advance_em(U'I'), 0.278);
  EXPECT_DOUBLE_EQ(glyph_advance_em(U' '), 0.278);
  // "HI" at 10 px: (722 + 278) / 1000 * 10.
  EXPECT_NEAR(text_width_px("hi", 10), 10.0, 1e-12);
  EXPECT_EQ(to_upper("on top é"), "ON TOP é");
}

TEST(FontMetrics, Utf8RoundTrip) {
  const std::string text = "a\xC3\xA9\xE2\x82\xAC\xF0\x9F\x98\x80";
  const auto cps = decode_utf8(text);
  ASSERT_EQ(cps, (std::vector<char32_t>{U'a', 0xE9, 0x20AC, 0x1F600}));
  std::string back;
  for (char32_t c : cps) back += encode_utf8(c);
  EXPECT_EQ(back, text);
  EXPECT_EQ(decode_utf8("\xFF"), std::vector<char32_t>{0xFFFD});
}

TEST(LabelGeometry, RectBoxPadsText) {
  const StreamPath s = flat_stream(100, 200);
  LabelDef label{"S", 1, "hi", LabelType::in, 1, LabelShape::rect};
  const std::vector<Point> chain{{50, 100}, {100, 100}, {150, 100}};
  const auto g = label_geometry(label, 0, chain, s, s.fill, {});
  ASSERT_TRUE(g.has_box);
  EXPECT_EQ(g.text, "HI");
  // 10 px of text plus 0.4 em (4 px) padding on each side.
  EXPECT_NEAR(g.box_width, 18.0, 1e-12);
  EXPECT_NEAR(g.box_height, 18.0, 1e-12);
  expect_point(g.box_center, {100, 100});
  EXPECT_FALSE(g.connector.has_value());
}

TEST(LabelGeometry, InsideLabelShrinksToStream) {
  const StreamPath s = flat_stream(100, 20);
  LabelDef label{"S", 1, "hi", LabelType::in, 3, LabelShape::ellipse};
  const std::vector<Point> chain{{100, 100}};
  const auto g = label_geometry(label, 0, chain, s, s.fill, {}, 20);
  EXPECT_NEAR(g.box_height * std::numbers::sqrt2, 20.0, 1e-9);
  EXPECT_LT(g.font_px, 30.0);
  const auto roomy = label_geometry(label, 0, chain, s, s.fill, {}, 500);
  EXPECT_DOUBLE_EQ(roomy.font_px, 30.0);
}

TEST(LabelGeometry, OutsideConnectorRunsFromBoxEdgeToOutline) {
  const StreamPath s = flat_stream(100, 20);
  LabelDef label{"S", 1, "hi", LabelType::out, 1, LabelShape::rect};
  const std::vector<Point> chain{{100, 40}};
  const auto g = label_geometry(label, 0, chain, s, s.fill, {});
  ASSERT_TRUE(g.connector.has_value());
  const auto [from, to] = *g.connector;
  EXPECT_NEAR(from.y, 40 + 9, 1e-6);  // bottom edge of the 18 px box
  EXPECT_NEAR(to.y, 90, 1e-9);        // top of the stream band
}

TEST(LabelGeometry, OnTopGlyphsFollowBaseline) {
  const StreamPath s = flat_stream(100, 40);
  LabelDef label{"S", 1, "abc", LabelType::on, 1, LabelShape::ellipse};
  const std::vector<Point> chain{{0, 100}, {100, 100}, {200, 100}};
  const auto g = label_geometry(label, 0, chain, s, s.fill, {});
  ASSERT_EQ(g.glyphs.size(), 3u);
  EXPECT_FALSE(g.has_box);
  for (const auto& glyph : g.glyphs) {
    EXPECT_NEAR(glyph.position.y, 103.5, 1e-9);  // 0.35 em below the center line
    EXPECT_NEAR(glyph.angle_deg, 0.0, 1e-9);
  }
  // Centered: A (6.67) + B (6.67) + C (7.22) = 20.56 px around x = 100.
  EXPECT_NEAR(g.glyphs[0].position.x, 100 - 10.28 + 3.335, 0.05);
  EXPECT_LT(g.glyphs[0].position.x, g.glyphs[1].position.x);
}

TEST(LabelGeometry, ShortBaselineIsExtended) {
  const StreamPath s = flat_stream(100, 40);
  LabelDef label{"S", 1, "a rather long caption", LabelType::on, 1, LabelShape::ellipse};
  const std::vector<Point> chain{{100, 100}};
  const auto g = label_geometry(label, 0, chain, s, s.fill, {});
  const auto pts = g.baseline.sample(32);
  const double length = pts.back().x - pts.front().x;
  EXPECT_GE(length + 1e-9, text_width_px(label.text, 10));
}

TEST(LinkGeometry, MergeRibbonWidensToTarget) {
  LinkDef link{"A", 0, "B", 1.0, true, LinkStyle::ribbon};
  const std::vector<Point> chain{{0, 0}, {100, 50}};
  const auto p = link_path(link, 0, chain, 4, 30, Rgb{});
  ASSERT_FALSE(p.ribbon.empty());
  EXPECT_NEAR(p.ribbon.segments[0].p0.y, -2, 1e-12);
  EXPECT_NEAR(p.ribbon.segments[0].p1.y, 35, 1e-12);
  link.merge = false;
  link.style = LinkStyle::line;
  const auto line = link_path(link, 0, chain, 4, 30, Rgb{});
  EXPECT_TRUE(line.ribbon.empty());
  EXPECT_EQ(line.centerline.segments.size(), 1u);
}

TEST(Scene, FigureSceneCounts) {
  const ChartSpec spec = fixtures::fig2a();
  const LayoutGraph g = build_graph(spec, {});
  auto state = init_positions(g, {}, Canvas{}, 42);
  run(state, g, {}, Canvas{});
  const SceneModel scene = build_scene(spec, g, state.y, {});
  EXPECT_EQ(scene.streams.size(), 3u);
  EXPECT_EQ(scene.links.size(), 2u);
  EXPECT_EQ(scene.anchors.size(), 1u);
  EXPECT_EQ(scene.labels.size(), 3u);
  // Outer streams paint before nested ones.
  EXPECT_EQ(scene.streams.back().id, "C");
  EXPECT_EQ(to_hex(scene.streams.back().fill), to_hex(nested_shade(*parse_color("purple"), 1)));
}
