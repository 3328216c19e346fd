#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "orcha/session.hpp"

namespace httplib {
class Server;
}

namespace orcha {

/// Reads streams.csv, links.csv and labels.csv from `dir`. Missing files
/// count as empty tables.
ChartSpec load_chart_dir(const std::filesystem::path& dir);

/// Writes the three tables into `dir`, each through a temporary file and a
/// rename so readers never observe a partial table.
void save_chart_dir(const ChartSpec& spec, const std::filesystem::path& dir);

/// Writes `content` to `path` via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// A Session behind a single worker thread. Ops run strictly in submission
/// order; reads see the last committed revision.
class ChartService {
 public:
  ChartService(ChartSpec spec, Config config);
  ~ChartService();
  ChartService(const ChartService&) = delete;
  ChartService& operator=(const ChartService&) = delete;

  std::future<EditResult> submit(EditOp op);
  EditResult apply(EditOp op) { return submit(std::move(op)).get(); }

  std::uint64_t revision() const;
  nlohmann::json chart_json() const;
  nlohmann::json layout_json() const;
  nlohmann::json config_json() const;
  std::optional<SvgDocument> svg(std::optional<std::uint64_t> revision = std::nullopt) const;
  ChartSpec spec() const;

  /// Blocks until the revision exceeds `since` or the timeout passes; returns
  /// the `{revision, layout}` update, or nullopt on timeout.
  std::optional<nlohmann::json> wait_for_update(std::uint64_t since,
                                                std::chrono::milliseconds timeout) const;

 private:
  struct Job {
    EditOp op;
    std::promise<EditResult> done;
  };

  void worker_loop();

  Session session_;
  mutable std::mutex session_mu_;  // guards session_
  mutable std::condition_variable updated_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<Job> queue_;
  bool stopping_ = false;
  std::thread worker_;
};

/// HTTP front end. The chart directory backs both the initial load and
/// POST /api/save.
class HttpServer {
 public:
  HttpServer(std::shared_ptr<ChartService> service, std::filesystem::path data_dir);
  ~HttpServer();

  /// Binds host:port (port 0 picks a free one) and serves on a background
  /// thread. Throws std::runtime_error when the port cannot be bound.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void serve_forever(const std::string& host, int port);
  void stop();

 private:
  void install_routes();

  std::shared_ptr<ChartService> service_;
  std::filesystem::path data_dir_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace orcha
