// Acceptance suite: one PASS/FAIL line per primary criterion.
#include <httplib.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "orcha/service.hpp"
#include "orcha/synth.hpp"
#include "test_helpers.hpp"

using namespace orcha;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::vector<Time> stream_times(const LayoutGraph& g, std::size_t s) {
  std::vector<Time> out;
  for (NodeId id : g.stream_nodes[s]) out.push_back(g.node(id).t);
  return out;
}

Outcome figure_structure() {
  Outcome o;
  const ChartSpec spec = fixtures::fig2a();
  const LayoutGraph g = build_graph(spec, {});
  const std::size_t a = *spec.stream_index("A"), b = *spec.stream_index("B"), c = *spec.stream_index("C");
  o.require(g.stream_nodes[a].size() == 5, "A has " + std::to_string(g.stream_nodes[a].size()) + " nodes");
  o.require(g.stream_nodes[b].size() == 7, "B has " + std::to_string(g.stream_nodes[b].size()) + " nodes");
  o.require(g.stream_nodes[c].size() == 3, "C has " + std::to_string(g.stream_nodes[c].size()) + " nodes");
  o.require(stream_times(g, a) == std::vector<Time>{2, 3, 4, 5, 6}, "A node times");
  for (NodeId id : g.stream_nodes[c]) {
    const Node& n = g.node(id);
    const auto parent = g.stream_node_at(b, n.t);
    o.require(parent && n.parent == parent, "C node not nested under B at same t");
  }
  std::size_t anchors = 0;
  for (const auto& n : g.nodes) anchors += n.kind == NodeKind::link_anchor;
  o.require(anchors == 1, "anchor count " + std::to_string(anchors));
  o.require(!g.link_chains[0].anchor.has_value(), "merge link A->B has an anchor");
  const auto& split = g.link_chains[1];
  o.require(split.anchor.has_value(), "link C->A has no anchor");
  if (split.anchor) {
    const Node& an = g.node(*split.anchor);
    o.require(an.parent && g.node(*an.parent).owner_key == "s:A", "anchor not nested in A");
  }
  o.require(g.label_chains.size() == 3, "label chain count");
  const LabelType expected[] = {LabelType::in, LabelType::out, LabelType::on};
  for (std::size_t i = 0; i < g.label_chains.size() && i < 3; ++i) {
    o.require(spec.labels[i].type == expected[i], "label type order");
    const auto& chain = g.label_chains[i];
    const Node& center = g.node(chain.nodes[chain.center]);
    o.require(center.kind == NodeKind::label_center, "label center kind");
    const bool nested = center.parent.has_value();
    o.require(nested == (expected[i] != LabelType::out), "label chain nesting does not match type");
  }
  o.detail = o.pass ? "A=5 B=7 C=3, C nested in B, 1 anchor (in A), chains in/out/on" : o.detail;
  return o;
}

Outcome size_interpolation() {
  Outcome o;
  const ChartSpec spec = fixtures::fig2a();
  const StreamDef& b = *spec.find_stream("B");
  const Time ts[] = {3, 4, 5, 9};
  const double want[] = {5, 7.5, 10, 5};
  std::ostringstream got;
  for (int i = 0; i < 4; ++i) {
    const double v = size_at(b, ts[i], GraphParams{}.default_size);
    got << (i ? "," : "") << v;
    o.require(std::abs(v - want[i]) <= 1e-9, "B(" + std::to_string(ts[i]) + ")=" + std::to_string(v));
  }
  if (o.pass) o.detail = "B(3,4,5,9) = " + got.str();
  return o;
}

Outcome layout_invariants() {
  Outcome o;
  const Config config;
  std::size_t checked = 0;
  auto check = [&](const ChartSpec& spec, const std::string& name, std::uint64_t seed) {
    const LayoutGraph g = build_graph(spec, config.graph);
    std::vector<double> xs;
    for (const auto& n : g.nodes) xs.push_back(n.x);
    SimulationState s = init_positions(g, config.force, config.canvas(), seed);
    run(s, g, config.force, config.canvas());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      o.require(std::memcmp(&xs[i], &g.nodes[i].x, sizeof(double)) == 0, name + ": x moved");
      o.require(g.axis.to_px(g.nodes[i].t) == g.nodes[i].x, name + ": x not a function of t");
    }
    const auto problems = check_constraints(g, s.y, config.force, config.canvas(), 1e-6);
    o.require(problems.empty(), name + ": " + (problems.empty() ? "" : problems.front()));
    o.require(check_acyclic(g), name + ": cycle");
    o.require(s.tick_count <= config.force.max_ticks, name + ": tick budget");
    ++checked;
  };
  check(fixtures::fig2a(), "fig2a", 42);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) check(random_spec(seed), "random seed " + std::to_string(seed), seed);
  if (o.pass) o.detail = std::to_string(checked) + " charts: x fixed, bounds, containment (1e-6 px), acyclic";
  return o;
}

std::string render_once(const Config& config) {
  const ChartSpec spec = fixtures::fig2a();
  return render_svg(spec, layout_chart(spec, config), config).text;
}

Outcome determinism() {
  Outcome o;
  Config config;
  config.seed = 42;
  const std::string first = render_once(config);
  const std::string second = render_once(config);
  o.require(first == second, "two library renders differ");

  const fs::path dir = fs::temp_directory_path() / "orcha-acceptance-determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path fig = fixtures::fixture_dir("fig2a");
  const fs::path out = dir / "cli.svg";
  const std::string cmd = std::string("ORCHA_SEED= ") + ORCHA_BINARY + " render --streams " +
                          (fig / "streams.csv").string() + " --links " + (fig / "links.csv").string() +
                          " --labels " + (fig / "labels.csv").string() + " --seed 42 --out " + out.string() +
                          " 2> " + (dir / "err.txt").string();
  o.require(std::system(cmd.c_str()) == 0, "CLI render failed");
  const std::string cli = fixtures::slurp(out);
  o.require(cli == first, "CLI bytes differ from library render");

  auto service = std::make_shared<ChartService>(load_chart_dir(fig), config);
  HttpServer server(service, dir);
  const int port = server.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/svg");
  o.require(res && res->status == 200, "GET /api/svg failed");
  if (res) o.require(res->body == cli, "service bytes differ from CLI");
  server.stop();
  fs::remove_all(dir);
  if (o.pass) o.detail = "seed 42: library x2, CLI and GET /api/svg byte-identical (" + std::to_string(cli.size()) + " bytes)";
  return o;
}

void collect_refs(const boost::property_tree::ptree& node, std::set<std::string>& ids,
                  std::vector<std::string>& refs) {
  for (const auto& [key, child] : node) {
    if (key != "<xmlattr>") {
      collect_refs(child, ids, refs);
      continue;
    }
    for (const auto& [name, value] : child) {
      const std::string v = value.data();
      if (name == "id") ids.insert(v);
      if (name == "xlink:href" && v.starts_with("#")) refs.push_back(v.substr(1));
      if (v.starts_with("url(#")) refs.push_back(v.substr(5, v.size() - 6));
    }
  }
}

Outcome scale_target() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const ChartSpec spec = synthetic_chart(42);
  const Config config;
  const ChartLayout layout = layout_chart(spec, config);
  const SvgDocument doc = render_svg(spec, layout, config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  o.require(spec.streams.size() == 44 && spec.links.size() == 61 && spec.labels.size() == 369,
            "synthetic chart has wrong scale");
  o.require(layout.state.tick_count <= 300, "ticks " + std::to_string(layout.state.tick_count));
  o.require(seconds <= 10.0, "took " + std::to_string(seconds) + " s");
  try {
    std::istringstream in(doc.text);
    boost::property_tree::ptree tree;
    boost::property_tree::read_xml(in, tree);
    std::set<std::string> ids;
    std::vector<std::string> refs;
    collect_refs(tree, ids, refs);
    for (const auto& r : refs) o.require(ids.count(r) == 1, "dangling reference #" + r);
    o.require(tree.get_child_optional("svg").has_value(), "root element is not <svg>");
  } catch (const std::exception& e) {
    o.require(false, std::string("SVG is not well-formed XML: ") + e.what());
  }
  const auto problems = check_constraints(*layout.graph, layout.state.y, config.force, config.canvas());
  o.require(problems.empty(), problems.empty() ? "" : problems.front());
  if (o.pass) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "44/61/369, %zu nodes, %zu ticks, %.2f s, %zu-byte well-formed SVG",
                  layout.graph->size(), layout.state.tick_count, seconds, doc.text.size());
    o.detail = buf;
  }
  return o;
}

Outcome wiggle_monotone() {
  Outcome o;
  const ChartSpec spec = fixtures::crossing_streams();
  std::ostringstream report;
  for (std::size_t s = 0; s < spec.streams.size(); ++s) {
    double previous = INFINITY;
    report << (s ? "; " : "") << spec.streams[s].id << ":";
    for (double k : {0.1, 0.5, 1.0}) {
      Config config;
      config.force.stiffness.stream = k;
      const ChartLayout layout = layout_chart(spec, config);
      const double w = wiggle_energy(*layout.graph, layout.state.y, s);
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.1f", w);
      report << buf;
      o.require(w <= previous, spec.streams[s].id + " wiggle rose at k=" + std::to_string(k));
      previous = w;
    }
  }
  o.detail = (o.pass ? "wiggle at k=0.1,0.5,1.0 " : o.detail + " | ") + report.str();
  return o;
}

Outcome incremental_relayout_check() {
  Outcome o;
  const Config config;
  const ChartSpec before = fixtures::fig2a();
  const ChartLayout converged = layout_chart(before, config);

  const EditOp op = AddLabel{{"A", 5, "added", LabelType::out, 1, LabelShape::ellipse}};
  const ChartSpec after = std::get<ChartSpec>(apply_op(before, op, config.graph.step));
  const LayoutGraph g2 = build_graph(after, config.graph);
  const SimulationState tick0 = incremental_relayout(converged.state, *converged.graph, g2, config.force,
                                                     config.canvas(), config.relayout.reheat_alpha);
  std::size_t kept = 0;
  for (const auto& old : converged.graph->nodes) {
    for (const auto& n : g2.nodes) {
      if (n.kind != old.kind || n.owner_key != old.owner_key || n.t != old.t) continue;
      ++kept;
      o.require(tick0.y[n.id.value] == converged.state.y[old.id.value], "node " + old.owner_key + " moved at tick 0");
    }
  }
  o.require(kept == converged.graph->size(), "only " + std::to_string(kept) + " old nodes survived");

  Session session(before, config);
  const EditResult r = session.apply(op);
  o.require(r.accepted, "edit rejected");
  o.require(r.ticks <= 120, "edit used " + std::to_string(r.ticks) + " ticks");
  if (o.pass) {
    o.detail = std::to_string(kept) + " pre-existing nodes unchanged at tick 0, " + std::to_string(r.ticks) +
               " ticks for the edit";
  }
  return o;
}

// About one op in five is built to break a rule.
EditOp random_op(std::mt19937_64& rng, const ChartSpec& spec, bool invalid) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const StreamDef& s = spec.streams[pick(spec.streams.size())];
  const double span = s.t1 - s.t0;
  const double inside = s.t0 + std::floor(span * static_cast<double>(rng() % 1000) / 1000.0);
  if (invalid) {
    switch (pick(5)) {
      case 0: return AddLabel{{s.id, s.t1 + 3, "late", LabelType::in, 1, LabelShape::ellipse}};
      case 1: return SetSizeAt{s.id, inside, 0.0};
      case 2: return AddStream{5, 2, {}};
      case 3: return AddLink{s.id, inside, s.id, inside + 1, false, LinkStyle::ribbon, {}};
      default: return DeleteEntity{Table::streams, "no-such-stream"};
    }
  }
  switch (pick(5)) {
    case 0: {
      const double t0 = static_cast<double>(pick(10));
      return AddStream{t0, t0 + 1 + static_cast<double>(pick(5)), {}};
    }
    case 1: return SetSizeAt{s.id, inside, 2.0 + static_cast<double>(pick(8))};
    case 2: {
      static const LabelType types[] = {LabelType::in, LabelType::out, LabelType::on};
      return AddLabel{{s.id, inside, "note", types[pick(3)], 1, LabelShape::ellipse}};
    }
    case 3: {
      AddLink op;
      op.from = s.id;
      op.t0 = inside;
      op.t1 = inside + 2;
      return op;
    }
    default:
      if (spec.labels.empty()) return SetSizeAt{s.id, s.t0, 4};
      return DeleteEntity{Table::labels, std::to_string(pick(spec.labels.size()))};
  }
}

std::string spec_bytes(const ChartSpec& spec) {
  const auto t = serialize(spec);
  return t.streams_csv + '\0' + t.links_csv + '\0' + t.labels_csv;
}

Outcome atomicity() {
  Outcome o;
  Config config;
  std::mt19937_64 rng(2024);
  Session session(fixtures::fig2a(), config);
  std::size_t accepted = 0, rejected = 0, planted = 0;
  for (int i = 0; i < 100; ++i) {
    const bool invalid = rng() % 5 == 0;
    planted += invalid;
    const EditOp op = random_op(rng, session.spec(), invalid);
    const std::string before = spec_bytes(session.spec());
    const auto y_before = session.layout().state.y;
    const auto rev_before = session.revision();
    const EditResult r = session.apply(op);
    if (r.accepted) {
      ++accepted;
    } else {
      ++rejected;
      o.require(spec_bytes(session.spec()) == before, "rejected op changed the spec");
      o.require(session.layout().state.y == y_before, "rejected op moved nodes");
      o.require(session.revision() == rev_before, "rejected op bumped the revision");
      o.require(!r.violations.empty(), "rejection without violations");
    }
    o.require(!invalid || !r.accepted, "planted invalid op was accepted");
  }
  o.require(session.revision() == accepted, "revision " + std::to_string(session.revision()) + " != accepted " +
                                                std::to_string(accepted));
  if (o.pass) {
    o.detail = "100 ops: " + std::to_string(accepted) + " accepted, " + std::to_string(rejected) + " rejected (" +
               std::to_string(planted) + " planted invalid), revision " + std::to_string(session.revision());
  }
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"figure 2a structure", figure_structure},
      {"size interpolation", size_interpolation},
      {"layout invariants", layout_invariants},
      {"determinism", determinism},
      {"scale target", scale_target},
      {"stiffness vs wiggle", wiggle_monotone},
      {"incremental relayout", incremental_relayout_check},
      {"edit atomicity", atomicity},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << index << " (" << name << "): " << o.detail << "\n";
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (8 - failed) << "/8\n";
  return failed ? 1 : 0;
}
