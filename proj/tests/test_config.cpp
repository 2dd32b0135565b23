#include <filesystem>

#include <gtest/gtest.h>

#include "advlb/harness/config.hpp"
#include "advlb/harness/report.hpp"
#include "support/toy_data.hpp"

using namespace advlb;

TEST(Config, DefaultsWhenEmpty) {
  const auto c = parse_toml_config("");
  EXPECT_EQ(c.search.t_max, 200);
  EXPECT_EQ(c.search.restarts, 200);
  EXPECT_EQ(c.search.step_sizes, (std::vector<double>{1, 2, 5, 10}));
  EXPECT_EQ(c.search.candidates.size(), 5u);
  EXPECT_EQ(c.search.bounds.min.lambda.nanometers, 380.0);
  EXPECT_EQ(c.search.bounds.max.lambda.nanometers, 750.0);
  EXPECT_EQ(c.augment_probability, 0.5);
  EXPECT_FALSE(c.toy.has_value());
  EXPECT_EQ(c.sweep.k_values, (std::vector<int>{1, 50, 100, 200}));
}

TEST(Config, ParsesSections) {
  const auto c = parse_toml_config(R"(
[bounds]
lambda = [400, 700]
w = [2, 10]
alpha = [0.6, 0.9]

[search]
t_max = 50
restarts = 7
seed = 12345
step_sizes = [1, 3]
align_to_units = true

[search.units]
r = 2
b = 1

[transforms]
rotation_deg = 2.5
batch_size = 4

[preprocess]
width = 64
height = 48
channel_order = "BGR"
softmax = true

[toy]
weights = [[0, 0, 0], [-10, -5, 20]]
bias = [0, -1.5]

[remote]
timeout_s = 2.5
retries = 4

[shift]
bands = [380, 500, 750]
beams_per_image = 2

[sweep]
width_values = [1, 2]
[sweep.lambda_fixed]
r = 30
w = 10

[run]
workers = 3
)");
  EXPECT_EQ(c.search.bounds.min.lambda.nanometers, 400.0);
  EXPECT_EQ(c.search.bounds.max.width, 10.0);
  EXPECT_EQ(c.search.bounds.min.intensity, 0.6);
  EXPECT_EQ(c.search.t_max, 50);
  EXPECT_EQ(c.search.restarts, 7);
  EXPECT_EQ(c.search.seed, 12345u);
  EXPECT_TRUE(c.search.align_to_units);
  ASSERT_EQ(c.search.candidates.size(), 2u);
  EXPECT_EQ(c.search.candidates[0].dim, Dim::Angle);
  EXPECT_EQ(c.search.candidates[0].unit, 2.0);
  EXPECT_EQ(c.transforms.rotation_deg, 2.5);
  EXPECT_EQ(c.transforms.batch_size, 4);
  EXPECT_EQ(c.preprocess.width, 64);
  EXPECT_EQ(c.preprocess.channel_order, ChannelOrder::BGR);
  EXPECT_TRUE(c.softmax);
  ASSERT_TRUE(c.toy.has_value());
  EXPECT_EQ(c.toy->weights[1][2], 20.0);
  EXPECT_EQ(c.remote.retries, 4);
  EXPECT_EQ(c.shift_bands, (std::vector<double>{380, 500, 750}));
  EXPECT_EQ(c.sweep.width_values, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.sweep.lambda_fixed.angle_deg, 30.0);
  EXPECT_EQ(c.sweep.lambda_fixed.width, 10.0);
  EXPECT_EQ(c.sweep.lambda_fixed.lambda.nanometers, 580.0);
  EXPECT_EQ(c.workers, 3u);
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(parse_toml_config("[bounds]\nlambda = [300, 700]\n"), DomainError);
  EXPECT_THROW(parse_toml_config("[bounds]\nw = [10, 2]\n"), DomainError);
  EXPECT_THROW(parse_toml_config("[bounds]\nw = [1]\n"), DomainError);
  EXPECT_THROW(parse_toml_config("[search]\nt_max = 0\n"), DomainError);
  EXPECT_THROW(parse_toml_config("[search]\nt_max = \"many\"\n"), DomainError);
  EXPECT_THROW(parse_toml_config("[search]\nstep_sizes = []\n"), DomainError);
  EXPECT_THROW(parse_toml_config("not toml ["), DomainError);
}

TEST(Config, JsonRoundTrip) {
  auto c = parse_toml_config("[search]\nseed = 99\n[toy]\nweights = [[1,2,3],[4,5,6]]\n");
  c.search.render.source_distance = 12.5;
  const Json j = to_json_value(c);
  const ToolConfig back = config_from_json(j);
  EXPECT_EQ(to_json_value(back), j);
  EXPECT_EQ(back.search.seed, 99u);
  EXPECT_EQ(back.search.render.source_distance, 12.5);
}

TEST(Config, LoadsSnapshotFromReport) {
  const auto dir = std::filesystem::temp_directory_path() / "advlb_config_test";
  std::filesystem::create_directories(dir);
  ToolConfig c;
  c.search.restarts = 3;
  write_json(dir / "report.json", make_report("eval", Json{{"kind", "toy"}}, c, Json::object()));
  const auto loaded = load_config(dir / "report.json");
  EXPECT_EQ(loaded.search.restarts, 3);
  EXPECT_THROW(load_config(dir / "missing.toml"), DomainError);
  std::filesystem::remove_all(dir);
}

TEST(Report, EvalJsonCarriesMetricsAndTraces) {
  const auto toy = make_toy_classifier(ToySpec::blue_sensitive());
  const auto source = planted::toy_dataset(toy, 5, 1);
  SearchConfig cfg;
  cfg.bounds = planted::small_raster_bounds(16);
  cfg.restarts = 2;
  cfg.t_max = 5;
  const auto r = run_eval(source, toy, cfg);
  const Json j = to_json_value(r);
  EXPECT_EQ(j.at("attempted").get<std::size_t>(), r.attempted);
  EXPECT_EQ(j.at("success_rate").get<double>(), r.success_rate);
  ASSERT_EQ(j.at("images").size(), 5u);
  EXPECT_TRUE(j.at("images")[0].at("outcome").contains("trace"));
  EXPECT_FALSE(to_json_value(r, false).at("images")[0].at("outcome").contains("trace"));
}

TEST(Report, CsvHeaders) {
  SweepTable t;
  t.dim = Dim::Width;
  t.rows.push_back({5.0, 1, 4, 25.0});
  EXPECT_EQ(sweep_csv(t), "w,success_rate,flips,evaluated\n5.0,25.0,1,4\n");
  std::vector<RestartRow> rows{{1, EvalReport{}}};
  EXPECT_EQ(restarts_csv(rows).substr(0, 2), "k,");
}
