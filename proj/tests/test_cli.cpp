#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "advlb/harness/config.hpp"
#include "advlb/io/image_io.hpp"
#include "support/mock_service.hpp"
#include "support/toy_data.hpp"

using namespace advlb;
namespace fs = std::filesystem;

namespace {

const std::string kCli = ADVLB_CLI_PATH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("advlb_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "data");
    const auto toy = make_toy_classifier(ToySpec::blue_sensitive());
    Rng rng(3);
    std::ofstream m(dir_ / "data" / "manifest.csv");
    m << "path,label\n";
    for (int i = 0; i < 6; ++i) {
      const auto img = io::quantize8(planted::toy_image(rng, 32, 32));
      const std::string name = "img" + std::to_string(i) + ".png";
      io::save_png(dir_ / "data" / name, img);
      m << name << "," << top1(toy.score(img)) << "\n";
    }
    std::ofstream(dir_ / "config.toml") << R"(
[preprocess]
width = 32
height = 32
[toy]
weights = [[0, 0, 0], [-10, -5, 20]]
bias = [0, -1.5]
[bounds]
b = [0, 31]
w = [1, 10]
[search]
t_max = 20
restarts = 4
seed = 11
[transforms]
batch_size = 3
[sweep]
width_values = [1, 5]
layout_angles = [0, 45, 90]
layout_intercepts = [0, 16]
k_values = [1, 2]
[sweep.lambda_fixed]
w = 8
[sweep.width_fixed]
b = 16
)";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string common(const std::string& out) const {
    return "--config " + (dir_ / "config.toml").string() + " --out " + (dir_ / out).string();
  }
  std::string manifest() const { return " --manifest " + (dir_ / "data" / "manifest.csv").string(); }
  std::string image() const { return " --image " + (dir_ / "data" / "img0.png").string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EvalIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(run("eval --toy " + common("a") + manifest()), 0);
  ASSERT_EQ(run("eval --toy " + common("b") + manifest()), 0);
  ASSERT_EQ(run("eval --toy " + common("c") + manifest() + " --workers 3"), 0);
  const auto a = slurp(dir_ / "a" / "report.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "report.json"));
  EXPECT_EQ(Json::parse(a).at("result"), Json::parse(slurp(dir_ / "c" / "report.json")).at("result"));
  const auto j = Json::parse(a);
  EXPECT_EQ(j.at("command"), "eval");
  EXPECT_EQ(j.at("config").at("search").at("seed"), 11);
  EXPECT_EQ(j.at("result").at("total"), 6);
}

TEST_F(CliTest, ReportConfigReproducesRun) {
  ASSERT_EQ(run("eval --toy " + common("a") + manifest()), 0);
  ASSERT_EQ(run("eval --toy --config " + (dir_ / "a" / "report.json").string() + " --out " +
                (dir_ / "b").string() + manifest()),
            0);
  EXPECT_EQ(Json::parse(slurp(dir_ / "a" / "report.json")).at("result"),
            Json::parse(slurp(dir_ / "b" / "report.json")).at("result"));
}

TEST_F(CliTest, AttackWritesAdversarialImage) {
  ASSERT_EQ(run("attack --toy " + common("o") + image()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "adversarial.png"));
  const auto j = Json::parse(slurp(dir_ / "o" / "report.json"));
  EXPECT_TRUE(j.at("result").contains("theta"));
}

TEST_F(CliTest, SweepsWriteTables) {
  for (const std::string dim : {"lambda", "width", "layout", "k"}) {
    ASSERT_EQ(run("sweep --toy --dim " + dim + " " + common(dim) + manifest()), 0) << dim;
    EXPECT_TRUE(fs::exists(dir_ / dim / "report.json")) << dim;
  }
  EXPECT_TRUE(fs::exists(dir_ / "lambda" / "sweep_lambda.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "layout" / "layout.png"));
  EXPECT_TRUE(fs::exists(dir_ / "k" / "restarts.csv"));
  EXPECT_NE(run("sweep --toy --dim colour " + common("x") + manifest()), 0);
}

TEST_F(CliTest, ShiftReportAugmentAndRobust) {
  ASSERT_EQ(run("shift-report --toy " + common("s") + manifest()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "shift.csv"));
  ASSERT_EQ(run("augment --probability 1 " + common("aug") + manifest()), 0);
  EXPECT_EQ(load_manifest(dir_ / "aug" / "manifest.csv", 2).entries.size(), 6u);
  ASSERT_EQ(run("robust-attack --toy " + common("r") + image()), 0);
  const auto j = Json::parse(slurp(dir_ / "r" / "report.json"));
  EXPECT_EQ(j.at("result").at("items").size(), 3u);
}

TEST_F(CliTest, ErrorsMapToExitCodes) {
  EXPECT_EQ(run("eval " + common("x") + manifest()), 2);  // no backend
  EXPECT_EQ(run("eval --toy " + common("x") + " --manifest /nonexistent.csv"), 2);
  EXPECT_EQ(run("eval --model /nonexistent.onnx " + common("x") + manifest()), 3);
  EXPECT_NE(run("eval --toy --model m.onnx " + common("x") + manifest()), 0);
}

TEST_F(CliTest, RemoteBackendEndToEnd) {
  const auto toy = make_toy_classifier(ToySpec::blue_sensitive());
  planted::MockService service(toy, 32, 32);
  ASSERT_EQ(run("eval --remote " + service.url() + " " + common("remote") + manifest()), 0);
  const auto remote = Json::parse(slurp(dir_ / "remote" / "report.json"));
  EXPECT_EQ(remote.at("backend").at("kind"), "remote");
  EXPECT_EQ(remote.at("result").at("total"), 6);
}
