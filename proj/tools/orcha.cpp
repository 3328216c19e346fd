// orcha: render charts from CSV, serve the authoring API, write synthetic data.
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "orcha/config.hpp"
#include "orcha/render.hpp"
#include "orcha/service.hpp"
#include "orcha/synth.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Overrides {
  std::string config_path;
  std::optional<double> width;
  std::optional<double> height;
  std::optional<double> step;
  std::optional<std::uint64_t> seed;
};

// Precedence, lowest first: defaults, config file, ORCHA_SEED, flags.
orcha::Config resolve_config(const Overrides& o) {
  orcha::Config config;
  if (!o.config_path.empty()) config = orcha::load_config(o.config_path, config);
  orcha::apply_seed_env(config);
  if (o.width) config.graph.width = *o.width;
  if (o.height) config.graph.height = *o.height;
  if (o.step) config.graph.step = *o.step;
  if (o.seed) config.seed = *o.seed;
  if (const auto problems = config.check(); !problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::runtime_error(msg);
  }
  return config;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--width", o.width, "canvas width in px");
  cmd->add_option("--height", o.height, "canvas height in px");
  cmd->add_option("--step", o.step, "time discretization step");
  cmd->add_option("--seed", o.seed, "seed for layout tie-breaks and noise");
}

int report_violations(const orcha::ValidationError& e) {
  std::cerr << "error: chart is invalid\n";
  for (const auto& v : e.violations()) std::cerr << "  " << v.describe() << "\n";
  return 1;
}

struct RenderArgs {
  std::string streams;
  std::string links;
  std::string labels;
  std::string out;
  Overrides overrides;
};

int run_render(const RenderArgs& a) {
  const orcha::Config config = resolve_config(a.overrides);
  const orcha::ChartSpec spec = orcha::parse_chart(
      read_file(a.streams), a.links.empty() ? std::string() : read_file(a.links),
      a.labels.empty() ? std::string() : read_file(a.labels));
  const orcha::ChartLayout layout = orcha::layout_chart(spec, config);
  const orcha::SvgDocument doc = orcha::render_svg(spec, layout, config);
  orcha::write_file_atomic(a.out, doc.text);
  std::cerr << "nodes " << layout.graph->size() << " edges " << layout.graph->edges.size()
            << " ticks " << layout.state.tick_count << "\n";
  return 0;
}

orcha::HttpServer* g_server = nullptr;

int run_serve(const std::string& data, int port, const std::string& host, const Overrides& o) {
  const orcha::Config config = resolve_config(o);
  auto service = std::make_shared<orcha::ChartService>(orcha::load_chart_dir(data), config);
  orcha::HttpServer server(service, data);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::cerr << "serving " << data << " on http://" << host << ":" << port << "\n";
  server.serve_forever(host, port);
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orcha: hand-drawn narrative charts from CSV"};
  app.require_subcommand(1);

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "lay out a chart and write SVG");
  render_cmd->add_option("--streams", render.streams, "streams table")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--links", render.links, "links table")->check(CLI::ExistingFile);
  render_cmd->add_option("--labels", render.labels, "labels table")->check(CLI::ExistingFile);
  render_cmd->add_option("--out", render.out, "output SVG path")->required();
  add_overrides(render_cmd, render.overrides);

  std::string data_dir;
  int port = 8080;
  std::string host = "127.0.0.1";
  Overrides serve_overrides;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP authoring API");
  serve_cmd->add_option("--data", data_dir, "directory holding the three CSV tables")->required();
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--host", host, "bind address");
  add_overrides(serve_cmd, serve_overrides);

  std::string synth_out;
  std::uint64_t synth_seed = 42;
  auto* synth_cmd = app.add_subcommand("synth", "write the large synthetic chart as CSV");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", synth_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*render_cmd) return run_render(render);
    if (*serve_cmd) return run_serve(data_dir, port, host, serve_overrides);
    if (*synth_cmd) {
      orcha::save_chart_dir(orcha::synthetic_chart(synth_seed), synth_out);
      return 0;
    }
  } catch (const orcha::ValidationError& e) {
    return report_violations(e);
  } catch (const orcha::ParseError& e) {
    std::cerr << "error: " << orcha::to_string(e.table()) << " line " << e.line() << ": " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
