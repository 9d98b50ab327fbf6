#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <tbresnet/serialization.hpp>

#include "app.hpp"

namespace fs = std::filesystem;
using tbresnet::Json;
using tbresnet::app::Overrides;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tbresnet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path config(const std::string& name, const Json& j) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  int run(const std::string& command, const Json& cfg, const std::string& out) {
    Overrides o;
    o.out = dir_ / out;
    stdout_.str("");
    stderr_.str("");
    return tbresnet::app::run(command, config(out + ".json", cfg), o, stdout_, stderr_);
  }

  std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
  }

  static std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

  fs::path dir_;
  std::ostringstream stdout_;
  std::ostringstream stderr_;
};

const Json kSmallNet = {{"depth", 3}, {"width", 8}, {"iterations", 60}, {"batch_size", 32}};

}  // namespace

TEST_F(CliTest, GenerateSurveySizedFileDeterministically) {
  const Json cfg = {{"scenario", "hd"}, {"generator", {{"n", 5340}}}, {"seed", 4}};
  ASSERT_EQ(run("generate", cfg, "a"), 0) << stderr_.str();
  EXPECT_NE(stdout_.str().find("Number of samples: 5340"), std::string::npos);
  ASSERT_EQ(run("generate", cfg, "b"), 0);
  const std::string data = slurp(dir_ / "a" / "data.csv");
  EXPECT_EQ(lines(data), 5341u);
  EXPECT_EQ(data, slurp(dir_ / "b" / "data.csv"));

  const Json manifest = tbresnet::read_json(dir_ / "a" / "manifest.json");
  EXPECT_EQ(manifest.at("command"), "generate");
  EXPECT_EQ(manifest.at("config_hash"), tbresnet::app::sha256_hex(slurp(dir_ / "a" / "config.json")));
  bool listed = false;
  for (const auto& f : manifest.at("files")) {
    EXPECT_EQ(f.at("sha256"), tbresnet::app::sha256_hex(slurp(dir_ / "a" / f.at("path").get<std::string>())));
    listed |= f.at("path") == "data.csv";
  }
  EXPECT_TRUE(listed);
}

TEST_F(CliTest, ConfigurationErrorsExitWithTwo) {
  EXPECT_EQ(run("generate", {{"generator", {{"n", 0}}}}, "n0"), 2);
  EXPECT_EQ(run("fit", {{"data", {{"path", "missing.csv"}}}}, "missing"), 2);
  EXPECT_NE(stderr_.str().find("missing.csv"), std::string::npos);
  EXPECT_EQ(run("fit", {{"dnn", {{"widht", 3}}}}, "typo"), 2);
  EXPECT_EQ(run("fit", {{"delta", 1.5}}, "delta"), 2);
  EXPECT_EQ(run("eval", Json::object(), "nomodel"), 2);
  EXPECT_EQ(run("explode", Json::object(), "cmd"), 2);
}

TEST_F(CliTest, DivergentTrainingExitsWithOne) {
  const Json cfg = {{"scenario", "pt"},
                    {"generator", {{"n", 200}}},
                    {"delta", 1.0},
                    {"dnn", {{"depth", 3}, {"width", 8}, {"iterations", 200}, {"learning_rate", 1e150}}}};
  EXPECT_EQ(run("fit", cfg, "nan"), 1) << stderr_.str();
}

TEST_F(CliTest, FitIsReproducibleAndEndpointsMatchPureModels) {
  const Json cfg = {{"scenario", "hd"}, {"generator", {{"n", 300}}}, {"delta", 0.0}, {"dnn", kSmallNet}, {"seed", 3}};
  ASSERT_EQ(run("fit", cfg, "f1"), 0) << stderr_.str();
  ASSERT_EQ(run("fit", cfg, "f2"), 0);
  EXPECT_EQ(slurp(dir_ / "f1" / "model.json"), slurp(dir_ / "f2" / "model.json"));
  Json pure = cfg;
  pure["trainer"] = "dcm_only";
  ASSERT_EQ(run("fit", pure, "pure"), 0);
  EXPECT_EQ(tbresnet::read_json(dir_ / "f1" / "metrics.json"), tbresnet::read_json(dir_ / "pure" / "metrics.json"));
}

TEST_F(CliTest, SweepTableHasEveryDelta) {
  const Json cfg = {{"scenario", "hd"}, {"generator", {{"n", 300}}}, {"dnn", kSmallNet}, {"workers", 2}};
  ASSERT_EQ(run("sweep", cfg, "s"), 0) << stderr_.str();
  const std::string table = slurp(dir_ / "s" / "sweep.csv");
  EXPECT_EQ(lines(table), 28u);
  EXPECT_EQ(table.substr(0, table.find('\n')), "delta,accuracy,cross_entropy,f1,baseline_accuracy,error");

  Json one = cfg;
  one["delta"] = 1.0;
  ASSERT_EQ(run("fit", one, "top"), 0);
  const Json fit = tbresnet::read_json(dir_ / "top" / "metrics.json");
  const Json sweep = tbresnet::read_json(dir_ / "s" / "sweep.json");
  const Json& last = sweep.at("rows").back();
  EXPECT_EQ(last.at("delta"), 1.0);
  EXPECT_EQ(last.at("accuracy"), fit.at("test").at("accuracy"));
}

TEST_F(CliTest, ModelCommandsShareOneModel) {
  const Json base = {{"scenario", "mnl"}, {"generator", {{"n", 400}}}, {"trainer", "dcm_only"}, {"dnn", kSmallNet}};
  ASSERT_EQ(run("fit", base, "m"), 0) << stderr_.str();
  Json cfg = base;
  cfg["model"] = (dir_ / "m" / "model.json").string();
  cfg["perturb"] = {{"epsilons", {0.0}}};
  cfg["elasticity"] = {{"attributes", {"alt1__cost"}}};
  cfg["surface"] = {{"alternative", 1},
                    {"attr_a", {{"attribute", "alt1__cost"}, {"resolution", 7}}},
                    {"attr_b", {{"attribute", "alt1__ivt"}, {"lo", 1}, {"hi", 30}, {"resolution", 5}}}};

  ASSERT_EQ(run("eval", cfg, "e"), 0) << stderr_.str();
  ASSERT_EQ(run("perturb", cfg, "p"), 0) << stderr_.str();
  const Json clean = tbresnet::read_json(dir_ / "e" / "metrics.json");
  for (const auto& report : tbresnet::read_json(dir_ / "p" / "perturbation.json")) {
    EXPECT_EQ(report.at("rows")[0].at("accuracy"), clean.at("accuracy"));
    EXPECT_EQ(report.at("rows")[0].at("cross_entropy"), clean.at("cross_entropy"));
  }

  ASSERT_EQ(run("elasticity", cfg, "el"), 0) << stderr_.str();
  const Json table = tbresnet::read_json(dir_ / "el" / "elasticity.json");
  ASSERT_EQ(table.size(), 5u);
  double cross = 0.0;
  for (const auto& row : table) {
    if (row.at("output_alternative") == 1) {
      EXPECT_LT(row.at("mean").get<double>(), 0.0);
    } else if (cross == 0.0) {
      cross = row.at("mean").get<double>();
      EXPECT_GT(cross, 0.0);
    } else {
      EXPECT_NEAR(row.at("mean").get<double>(), cross, 1e-10);
    }
  }

  ASSERT_EQ(run("surface", cfg, "sf"), 0) << stderr_.str();
  EXPECT_EQ(lines(slurp(dir_ / "sf" / "surface.csv")), 1u + 7u * 5u);
  const Json meta = tbresnet::read_json(dir_ / "sf" / "surface.json");
  EXPECT_TRUE(meta.contains("reference"));
}
