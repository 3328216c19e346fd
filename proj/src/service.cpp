#include "orcha/service.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

namespace orcha {

namespace {

using nlohmann::json;

std::string read_optional(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<std::uint64_t> parse_u64(std::string_view token) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

void send_result(httplib::Response& res, const EditResult& r) {
  if (r.accepted) {
    send_json(res, 200, {{"accepted", true}, {"revision", r.revision}, {"ticks", r.ticks}});
  } else {
    send_json(res, 422, {{"accepted", false},
                         {"revision", r.revision},
                         {"violations", violations_to_json(r.violations)}});
  }
}

}  // namespace

ChartSpec load_chart_dir(const std::filesystem::path& dir) {
  return parse_chart(read_optional(dir / "streams.csv"), read_optional(dir / "links.csv"),
                     read_optional(dir / "labels.csv"));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_chart_dir(const ChartSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto tables = serialize(spec);
  write_file_atomic(dir / "streams.csv", tables.streams_csv);
  write_file_atomic(dir / "links.csv", tables.links_csv);
  write_file_atomic(dir / "labels.csv", tables.labels_csv);
}

ChartService::ChartService(ChartSpec spec, Config config)
    : session_(std::move(spec), std::move(config)), worker_([this] { worker_loop(); }) {}

ChartService::~ChartService() {
  {
    std::lock_guard lock(queue_mu_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  worker_.join();
}

std::future<EditResult> ChartService::submit(EditOp op) {
  Job job{std::move(op), {}};
  auto fut = job.done.get_future();
  {
    std::lock_guard lock(queue_mu_);
    queue_.push_back(std::move(job));
  }
  queue_cv_.notify_one();
  return fut;
}

void ChartService::worker_loop() {
  for (;;) {
    Job job;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;  // stopping with nothing left
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      EditResult result;
      {
        std::lock_guard lock(session_mu_);
        result = session_.apply(job.op);
      }
      if (result.accepted) updated_.notify_all();
      job.done.set_value(std::move(result));
    } catch (...) {
      job.done.set_exception(std::current_exception());
    }
  }
}

std::uint64_t ChartService::revision() const {
  std::lock_guard lock(session_mu_);
  return session_.revision();
}

json ChartService::chart_json() const {
  std::lock_guard lock(session_mu_);
  json j = spec_to_json(session_.spec());
  j["revision"] = session_.revision();
  return j;
}

json ChartService::layout_json() const {
  std::lock_guard lock(session_mu_);
  return session_.layout_json();
}

json ChartService::config_json() const {
  std::lock_guard lock(session_mu_);
  return to_json(session_.config());
}

std::optional<SvgDocument> ChartService::svg(std::optional<std::uint64_t> revision) const {
  std::lock_guard lock(session_mu_);
  if (!revision) return session_.svg();
  return session_.svg_at(*revision);
}

ChartSpec ChartService::spec() const {
  std::lock_guard lock(session_mu_);
  return session_.spec();
}

std::optional<json> ChartService::wait_for_update(std::uint64_t since,
                                                  std::chrono::milliseconds timeout) const {
  std::unique_lock lock(session_mu_);
  if (!updated_.wait_for(lock, timeout, [&] { return session_.revision() > since; })) {
    return std::nullopt;
  }
  return json{{"revision", session_.revision()}, {"layout", session_.layout_json()}};
}

HttpServer::HttpServer(std::shared_ptr<ChartService> service, std::filesystem::path data_dir)
    : service_(std::move(service)),
      data_dir_(std::move(data_dir)),
      server_(std::make_unique<httplib::Server>()) {
  // The library default adds SO_REUSEPORT, which would let a second server
  // silently share a busy port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  auto& svc = *service_;

  server_->Get("/api/chart", [&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, svc.chart_json());
  });

  server_->Get("/api/layout", [&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, svc.layout_json());
  });

  server_->Get("/api/config", [&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, svc.config_json());
  });

  server_->Get("/api/svg", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::uint64_t> rev;
    if (req.has_param("rev")) {
      rev = parse_u64(req.get_param_value("rev"));
      if (!rev) return send_error(res, 400, "rev must be a non-negative integer");
    }
    const auto doc = svc.svg(rev);
    if (!doc) return send_error(res, 404, "unknown revision");
    res.set_content(doc->text, "image/svg+xml");
  });

  server_->Post("/api/ops", [&svc](const httplib::Request& req, httplib::Response& res) {
    EditOp op;
    try {
      op = edit_op_from_json(json::parse(req.body));
    } catch (const std::exception& e) {
      return send_error(res, 400, e.what());
    }
    send_result(res, svc.apply(std::move(op)));
  });

  server_->Post("/api/relayout", [&svc](const httplib::Request&, httplib::Response& res) {
    send_result(res, svc.apply(Relayout{}));
  });

  server_->Post("/api/save", [this](const httplib::Request&, httplib::Response& res) {
    try {
      save_chart_dir(service_->spec(), data_dir_);
    } catch (const std::exception& e) {
      return send_error(res, 500, e.what());
    }
    send_json(res, 200, {{"saved", data_dir_.string()}, {"revision", service_->revision()}});
  });

  // Long-poll push channel: answers as soon as a revision newer than `since`
  // is committed, or 204 after `timeout` milliseconds (default 25 s).
  server_->Get("/api/updates", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t since = 0;
    std::uint64_t timeout_ms = 25000;
    if (req.has_param("since")) {
      const auto v = parse_u64(req.get_param_value("since"));
      if (!v) return send_error(res, 400, "since must be a non-negative integer");
      since = *v;
    }
    if (req.has_param("timeout")) {
      const auto v = parse_u64(req.get_param_value("timeout"));
      if (!v) return send_error(res, 400, "timeout must be a non-negative integer");
      timeout_ms = std::min<std::uint64_t>(*v, 60000);
    }
    if (const auto update = svc.wait_for_update(since, std::chrono::milliseconds(timeout_ms))) {
      send_json(res, 200, *update);
    } else {
      res.status = 204;
    }
  });
}

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::serve_forever(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  server_->listen_after_bind();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace orcha
