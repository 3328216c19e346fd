#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <sys/wait.h>

#include "orcha/config.hpp"
#include "orcha/render.hpp"
#include "orcha/service.hpp"
#include "test_helpers.hpp"

using namespace orcha;
namespace fs = std::filesystem;

namespace {

struct Exit {
  int code = 0;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("orcha-cli-") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Exit orcha(const std::string& args, const std::string& env = "") {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = env + " " + ORCHA_BINARY + " " + args + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status), fixtures::slurp(err)};
  }

  std::string fig(const std::string& name) { return (fixtures::fixture_dir("fig2a") / name).string(); }
  std::string fig_args() {
    return "--streams " + fig("streams.csv") + " --links " + fig("links.csv") + " --labels " + fig("labels.csv");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RendersFigureAndReportsCounts) {
  const auto out = dir_ / "fig.svg";
  const Exit r = orcha("render " + fig_args() + " --out " + out.string(), "ORCHA_SEED=");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("nodes "), std::string::npos);
  EXPECT_NE(r.err.find(" edges "), std::string::npos);
  EXPECT_NE(r.err.find(" ticks "), std::string::npos);
  const std::string svg = fixtures::slurp(out);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(CliTest, MatchesLibraryRenderBytes) {
  const auto out = dir_ / "fig.svg";
  ASSERT_EQ(orcha("render " + fig_args() + " --out " + out.string() + " --seed 42", "ORCHA_SEED=").code, 0);
  Config config;
  config.seed = 42;
  const ChartSpec spec = fixtures::fig2a();
  EXPECT_EQ(fixtures::slurp(out), render_svg(spec, layout_chart(spec, config), config).text);
}

TEST_F(CliTest, LabelsAreOptional) {
  const auto out = dir_ / "nolabels.svg";
  const Exit r = orcha("render --streams " + fig("streams.csv") + " --links " + fig("links.csv") + " --out " +
                      out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string svg = fixtures::slurp(out);
  EXPECT_EQ(svg.find("class=\"label "), std::string::npos);
  EXPECT_NE(svg.find("class=\"stream\""), std::string::npos);
}

TEST_F(CliTest, InvalidParentFailsWithoutOutput) {
  const auto streams = dir_ / "streams.csv";
  {
    std::ofstream f(streams);
    f << "id,t0,t1,color,size,parent\nA,2,6,red,,\nC,4,6,blue,,Q\n";
  }
  const auto out = dir_ / "bad.svg";
  const Exit r = orcha("render --streams " + streams.string() + " --out " + out.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("streams row 2: unknown parent stream"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST_F(CliTest, ParseErrorNamesLine) {
  const auto streams = dir_ / "streams.csv";
  {
    std::ofstream f(streams);
    f << "id,t0,t1,color,size,parent\nA,2\n";
  }
  const Exit r = orcha("render --streams " + streams.string() + " --out " + (dir_ / "x.svg").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("streams line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, SeedPrecedence) {
  const auto a = dir_ / "a.svg", b = dir_ / "b.svg", c = dir_ / "c.svg";
  const auto config = dir_ / "config.json";
  {
    std::ofstream f(config);
    f << R"({"seed": 5, "canvas": {"width": 900}})";
  }
  ASSERT_EQ(orcha("render " + fig_args() + " --config " + config.string() + " --out " + a.string(), "ORCHA_SEED=").code, 0);
  ASSERT_EQ(orcha("render " + fig_args() + " --config " + config.string() + " --out " + b.string(), "ORCHA_SEED=9").code, 0);
  ASSERT_EQ(orcha("render " + fig_args() + " --config " + config.string() + " --seed 5 --out " + c.string(), "ORCHA_SEED=9").code, 0);
  const std::string sa = fixtures::slurp(a), sb = fixtures::slurp(b), sc = fixtures::slurp(c);
  EXPECT_NE(sa.find("seed=\"5\""), std::string::npos);
  EXPECT_NE(sa.find("width=\"900.00\""), std::string::npos);
  EXPECT_NE(sb.find("seed=\"9\""), std::string::npos);
  EXPECT_EQ(sa, sc);
}

TEST_F(CliTest, BadSeedEnvIsAnError) {
  const Exit r = orcha("render " + fig_args() + " --out " + (dir_ / "x.svg").string(), "ORCHA_SEED=abc");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("ORCHA_SEED"), std::string::npos);
}

TEST_F(CliTest, SynthWritesLoadableTables) {
  ASSERT_EQ(orcha("synth --out " + dir_.string()).code, 0);
  const ChartSpec spec = load_chart_dir(dir_);
  EXPECT_EQ(spec.streams.size(), 44u);
  EXPECT_EQ(spec.links.size(), 61u);
  EXPECT_EQ(spec.labels.size(), 369u);
}

TEST_F(CliTest, UnknownCommandFails) { EXPECT_NE(orcha("paint").code, 0); }
