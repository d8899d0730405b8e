#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "everlast/errors.hpp"
#include "everlast/run_config.hpp"

using namespace everlast;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({"mechanism": "EV", "strategies": [{"type": "preregistered", "tag": "a", "queries": 5}]})");
}

}  // namespace

TEST(RunConfig, Defaults) {
  const auto c = parse_run_config(minimal());
  EXPECT_EQ(c.mechanism, MechanismKind::kEV);
  EXPECT_DOUBLE_EQ(c.params.tau, 0.4);
  EXPECT_EQ(c.distribution.domain_size, 64u);
  EXPECT_EQ(c.schedule, ScheduleKind::kRoundRobin);
  EXPECT_EQ(c.output.csv, "transcript.csv");
}

TEST(RunConfig, RoundTripThroughJson) {
  auto j = minimal();
  j["strategies"].push_back({{"type", "sign_aggregation"}, {"tag", "eve"}, {"probes", 7}});
  j["schedule"] = "random";
  j["params"] = {{"tau", 0.3}, {"beta", 0.05}};
  j["output"] = {{"csv", nullptr}};
  const auto c = parse_run_config(j);
  const auto back = parse_run_config(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_FALSE(back.output.csv.has_value());
  EXPECT_EQ(back.strategies[1].probes, 7u);
}

TEST(RunConfig, Errors) {
  auto bad = [](auto mutate) {
    auto j = minimal();
    mutate(j);
    return j;
  };
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["bogus"] = 1; })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["params"] = {{"tua", 0.4}}; })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["mechanism"] = "XYZ"; })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["trials"] = 0; })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["trials"] = "many"; })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j.erase("mechanism"); })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["strategies"] = json::array(); })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["strategies"].push_back(j["strategies"][0]); })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["strategies"][0]["queries"] = 0; })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["strategies"][0]["law"] = "gaussian"; })), ConfigError);
  EXPECT_THROW(parse_run_config(bad([](json& j) { j["output"] = {{"csv", "../x.csv"}}; })), ConfigError);
}

TEST(RunConfig, LoadResolvesRelativePaths) {
  const auto dir = std::filesystem::temp_directory_path() / "everlast_run_config_test";
  std::filesystem::create_directories(dir);
  auto j = minimal();
  j["output"] = {{"dir", "out"}};
  j["strategies"][0].erase("queries");
  j["strategies"][0]["query_files"] = {"q.txt"};
  std::ofstream(dir / "cfg.json") << j.dump();
  const auto c = load_run_config(dir / "cfg.json");
  EXPECT_EQ(c.output.dir, dir / "out");
  EXPECT_EQ(c.strategies[0].query_files.at(0), dir / "q.txt");
  EXPECT_THROW(load_run_config(dir / "missing.json"), ConfigError);
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_THROW(load_run_config(dir / "broken.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(RunConfig, OutputDirEnvironmentOverride) {
  OutputSpec o;
  o.dir = "from-config";
  unsetenv("EVERLAST_OUTPUT_DIR");
  EXPECT_EQ(resolve_output_dir(o), std::filesystem::path("from-config"));
  setenv("EVERLAST_OUTPUT_DIR", "/tmp/elsewhere", 1);
  EXPECT_EQ(resolve_output_dir(o), std::filesystem::path("/tmp/elsewhere"));
  unsetenv("EVERLAST_OUTPUT_DIR");
}

TEST(RunConfig, EnumNames) {
  EXPECT_EQ(parse_mechanism("naive"), MechanismKind::kNaiveBaseline);
  EXPECT_EQ(to_string(MechanismKind::kThresholdoutOnly), "ThresholdoutOnly");
  EXPECT_EQ(parse_schedule(to_string(ScheduleKind::kSequential)), ScheduleKind::kSequential);
  EXPECT_EQ(parse_strategy_type(to_string(StrategyType::kCollusion)), StrategyType::kCollusion);
}
