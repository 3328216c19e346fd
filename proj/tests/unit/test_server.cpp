#include <gtest/gtest.h>

#include <httplib.h>

#include <filesystem>
#include <future>

#include "orcha/service.hpp"
#include "test_helpers.hpp"

using namespace orcha;
using nlohmann::json;

namespace {

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    data_ = std::filesystem::temp_directory_path() /
            ("orcha-server-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(data_);
    std::filesystem::create_directories(data_);
    for (const char* f : {"streams.csv", "links.csv", "labels.csv"}) {
      std::filesystem::copy_file(fixtures::fixture_dir("fig2a") / f, data_ / f);
    }
    config_.force.max_ticks = 80;
    service_ = std::make_shared<ChartService>(load_chart_dir(data_), config_);
    server_ = std::make_unique<HttpServer>(service_, data_);
    port_ = server_->start("127.0.0.1", 0);
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    server_->stop();
    std::filesystem::remove_all(data_);
  }

  httplib::Result post_op(const json& op) { return client_->Post("/api/ops", op.dump(), "application/json"); }

  std::filesystem::path data_;
  Config config_;
  std::shared_ptr<ChartService> service_;
  std::unique_ptr<HttpServer> server_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST_F(ServerTest, ChartHasThreeStreams) {
  auto res = client_->Get("/api/chart");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto j = json::parse(res->body);
  EXPECT_EQ(j["streams"].size(), 3u);
  EXPECT_EQ(j["revision"], 0);
  EXPECT_EQ(j["links"][0]["merge"], true);
}

TEST_F(ServerTest, LayoutAndConfig) {
  auto layout = client_->Get("/api/layout");
  ASSERT_TRUE(layout);
  EXPECT_FALSE(json::parse(layout->body)["nodes"].empty());
  auto config = client_->Get("/api/config");
  ASSERT_TRUE(config);
  const auto j = json::parse(config->body);
  EXPECT_EQ(j["force"]["maxTicks"], 80);
  EXPECT_EQ(j["relayout"]["maxTicks"], 120);
}

TEST_F(ServerTest, InvalidOpIs422AndKeepsRevision) {
  auto res = post_op({{"op", "SetSizeAt"}, {"stream", "B"}, {"t", 50}, {"size", 3}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  const auto j = json::parse(res->body);
  EXPECT_EQ(j["revision"], 0);
  ASSERT_FALSE(j["violations"].empty());
  EXPECT_EQ(j["violations"][0]["message"], "size time outside stream interval");
  EXPECT_EQ(service_->revision(), 0u);
}

TEST_F(ServerTest, MalformedOpIs400) {
  auto res = client_->Post("/api/ops", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = post_op({{"op", "Nope"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST_F(ServerTest, AcceptedOpBumpsRevision) {
  auto res = post_op({{"op", "AddStream"}, {"t0", 2}, {"t1", 6}, {"color", "#D73"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["revision"], 1);
  EXPECT_EQ(json::parse(client_->Get("/api/chart")->body)["streams"].size(), 4u);
}

TEST_F(ServerTest, SvgMatchesDirectRender) {
  const ChartSpec spec = fixtures::fig2a();
  const std::string direct = render_svg(spec, layout_chart(spec, config_), config_).text;
  auto res = client_->Get("/api/svg");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/svg+xml");
  EXPECT_EQ(res->body, direct);
  auto rev0 = client_->Get("/api/svg?rev=0");
  ASSERT_TRUE(rev0);
  EXPECT_EQ(rev0->body, direct);
  EXPECT_EQ(client_->Get("/api/svg?rev=5")->status, 404);
  EXPECT_EQ(client_->Get("/api/svg?rev=abc")->status, 400);
}

TEST_F(ServerTest, LongPollDeliversNextRevision) {
  auto waiter = std::async(std::launch::async, [this] {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    return c.Get("/api/updates?since=0&timeout=5000");
  });
  ASSERT_TRUE(post_op({{"op", "AddStream"}, {"t0", 1}, {"t1", 2}}));
  auto res = waiter.get();
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto j = json::parse(res->body);
  EXPECT_EQ(j["revision"], 1);
  EXPECT_TRUE(j["layout"].contains("nodes"));
}

TEST_F(ServerTest, LongPollTimesOut) {
  auto res = client_->Get("/api/updates?since=0&timeout=50");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
}

TEST_F(ServerTest, SaveRoundTrips) {
  ASSERT_EQ(post_op({{"op", "SetSizeAt"}, {"stream", "A"}, {"t", 4}, {"size", 9}})->status, 200);
  auto res = client_->Post("/api/save", "", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(load_chart_dir(data_), service_->spec());
  EXPECT_FALSE(std::filesystem::exists(data_ / "streams.csv.tmp"));
}

TEST_F(ServerTest, RelayoutEndpoint) {
  auto res = client_->Post("/api/relayout", "", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(service_->revision(), 1u);
}

TEST_F(ServerTest, ConcurrentOpsApplyInOrder) {
  std::vector<std::future<EditResult>> pending;
  for (int i = 0; i < 10; ++i) {
    pending.push_back(service_->submit(AddLabel{{"B", 3.0 + (i % 6), "n" + std::to_string(i), LabelType::in, 1,
                                                 LabelShape::ellipse}}));
  }
  for (int i = 0; i < 10; ++i) EXPECT_EQ(pending[i].get().revision, static_cast<std::uint64_t>(i + 1));
  const auto labels = service_->spec().labels;
  ASSERT_EQ(labels.size(), 13u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(labels[3 + i].text, "n" + std::to_string(i));
}

TEST_F(ServerTest, BusyPortFailsToStart) {
  HttpServer second(service_, data_);
  EXPECT_THROW(second.start("127.0.0.1", port_), std::runtime_error);
}

TEST(ServiceFiles, MissingTablesAreEmpty) {
  const auto dir = std::filesystem::temp_directory_path() / "orcha-empty-dir";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  EXPECT_EQ(load_chart_dir(dir), ChartSpec{});
  std::filesystem::remove_all(dir);
}
