#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "se23lqr/se23lqr.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  se23_config* p = nullptr;
  ~Config() { se23_config_free(p); }
};

struct Result {
  se23_result* p = nullptr;
  ~Result() { se23_result_free(p); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const char* kShort = R"({"scenario": {"duration": 0.5}, "heading_sweep": {"headings_deg": [0, 180]},
                         "monte_carlo": {"trials": 3, "scenario": {"duration": 0.5}}})";

}  // namespace

TEST(CApi, Version) { EXPECT_STRNE(se23_version(), ""); }

TEST(CApi, ParseDefaultsAndErrors) {
  Config c;
  ASSERT_EQ(se23_config_parse(nullptr, &c.p), SE23_OK);
  EXPECT_NE(std::strstr(se23_config_json(c.p), "se23-nodrag"), nullptr);

  se23_config* bad = nullptr;
  EXPECT_EQ(se23_config_parse("{\"nope\": 1}", &bad), SE23_CONFIG);
  EXPECT_EQ(bad, nullptr);
  EXPECT_NE(std::strstr(se23_last_error(), "nope"), nullptr);
  EXPECT_EQ(se23_config_parse("{}", nullptr), SE23_INVALID_ARGUMENT);
}

TEST(CApi, SettersEchoIntoJson) {
  Config c;
  ASSERT_EQ(se23_config_parse("", &c.p), SE23_OK);
  ASSERT_EQ(se23_config_set_seed(c.p, 1234), SE23_OK);
  ASSERT_EQ(se23_config_set_variant(c.p, "conv-drag"), SE23_OK);
  const std::string js = se23_config_json(c.p);
  EXPECT_NE(js.find("1234"), std::string::npos);
  EXPECT_NE(js.find("conv-drag"), std::string::npos);
  EXPECT_EQ(se23_config_set_variant(c.p, "bogus"), SE23_INVALID_ARGUMENT);
  EXPECT_EQ(se23_config_set_seed(nullptr, 1), SE23_INVALID_ARGUMENT);
}

TEST(CApi, SimulateAndInspect) {
  Config c;
  ASSERT_EQ(se23_config_parse(kShort, &c.p), SE23_OK);
  Result r;
  ASSERT_EQ(se23_simulate(c.p, &r.p), SE23_OK) << se23_last_error();
  ASSERT_EQ(se23_result_tick_count(r.p), 200u);
  double rmse[3];
  ASSERT_EQ(se23_result_rmse(r.p, rmse), SE23_OK);
  EXPECT_LT(rmse[2], 1e-2);
  double fin = -1;
  ASSERT_EQ(se23_result_final_position_error(r.p, &fin), SE23_OK);
  EXPECT_GE(fin, 0.0);
  double row[20];
  ASSERT_EQ(se23_result_tick(r.p, 1, row), SE23_OK);
  EXPECT_DOUBLE_EQ(row[0], 0.0025);
  EXPECT_GT(row[13], 0.0);
  EXPECT_EQ(se23_result_tick(r.p, 200, row), SE23_INVALID_ARGUMENT);
  EXPECT_EQ(se23_result_tick_count(nullptr), 0u);
}

TEST(CApi, InvalidScenarioReportsConfigError) {
  Config c;
  ASSERT_EQ(se23_config_parse(R"({"scenario": {"duration": -1}})", &c.p), SE23_OK);
  Result r;
  EXPECT_EQ(se23_simulate(c.p, &r.p), SE23_CONFIG);
  EXPECT_EQ(r.p, nullptr);
  EXPECT_STRNE(se23_last_error(), "");
}

TEST(CApi, ExperimentsWriteFiles) {
  Config c;
  ASSERT_EQ(se23_config_parse(kShort, &c.p), SE23_OK);
  const fs::path root = fs::temp_directory_path() / "se23lqr_capi";
  fs::remove_all(root);
  const std::pair<const char*, std::vector<const char*>> cases[] = {
      {"simulate", {"ticks.csv", "summary.csv", "manifest.json"}},
      {"sweep-heading", {"summary.csv", "manifest.json"}},
      {"uncertainty", {"summary.csv", "ticks_integrator-on_se23-nodrag.csv", "manifest.json"}},
      {"monte-carlo", {"trials.csv", "aggregate.csv", "manifest.json"}},
      {"gains", {"gains.csv", "reference.csv", "manifest.json"}},
  };
  for (const auto& [name, files] : cases) {
    const fs::path dir = root / name;
    ASSERT_EQ(se23_run_experiment(c.p, name, dir.c_str()), SE23_OK) << name << ": " << se23_last_error();
    for (const char* f : files) EXPECT_TRUE(fs::exists(dir / f)) << name << "/" << f;
  }
  EXPECT_EQ(se23_run_experiment(c.p, "fly", (root / "x").c_str()), SE23_INVALID_ARGUMENT);
  fs::remove_all(root);
}

TEST(CApi, RepeatedExperimentIsByteIdentical) {
  Config c;
  ASSERT_EQ(se23_config_parse(kShort, &c.p), SE23_OK);
  const fs::path root = fs::temp_directory_path() / "se23lqr_capi_det";
  fs::remove_all(root);
  for (const char* name : {"simulate", "monte-carlo"}) {
    ASSERT_EQ(se23_run_experiment(c.p, name, (root / "a").c_str()), SE23_OK);
    ASSERT_EQ(se23_run_experiment(c.p, name, (root / "b").c_str()), SE23_OK);
    for (const auto& e : fs::directory_iterator(root / "a")) {
      EXPECT_EQ(slurp(e.path()), slurp(root / "b" / e.path().filename())) << name << " " << e.path().filename();
    }
    fs::remove_all(root);
  }
}
