#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace hisparse;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hisparse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hisparse_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const Json& j) {
    const auto path = (dir_ / "config.json").string();
    std::ofstream(path) << j.dump(2);
    return path;
  }

  static Json tiny() {
    return Json::parse(R"({"sparsity": {"flat": {"N": 4, "n": 5, "s": 2, "sigma": 2}},
                           "m_grid": [10, 14, 18], "trials": 4, "seed": 3})");
  }

  Index csv_rows(const fs::path& file) {
    std::ifstream in(file);
    std::string line;
    Index rows = 0;
    while (std::getline(in, line)) ++rows;
    return rows - 1;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, MissingConfigIsExitTwoAndNamesPath) {
  const auto path = (dir_ / "nope.json").string();
  const auto r = invoke({"sweep", "--config", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(path), std::string::npos);
}

TEST_F(CliTest, MalformedConfigIsExitTwo) {
  const auto path = (dir_ / "bad.json").string();
  std::ofstream(path) << "{ not json";
  EXPECT_EQ(invoke({"sweep", "--config", path}).code, 2);
}

TEST_F(CliTest, InvalidParametersAreExitThreeWithFieldName) {
  auto j = tiny();
  j["trials"] = 0;
  auto r = invoke({"sweep", "--config", write_config(j), "--output", dir_.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("trials"), std::string::npos);
  j = tiny();
  j["m_grid"] = {100};
  r = invoke({"sweep", "--config", write_config(j), "--output", dir_.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("m_grid"), std::string::npos);
  EXPECT_EQ(invoke({"bogus"}).code, 3);
  EXPECT_EQ(invoke({}).code, 3);
}

TEST_F(CliTest, SweepWritesOneRowPerTrialAndAlgorithm) {
  const auto r = invoke({"sweep", "--config", write_config(tiny()), "--output", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(dir_ / "sweep.csv"), 4u * 3u * 2u);
  EXPECT_TRUE(fs::exists(dir_ / "sweep.json"));
  EXPECT_TRUE(fs::exists(dir_ / "summary.csv"));
  std::ifstream side(dir_ / "sweep.json");
  const Json sidecar = Json::parse(side);
  EXPECT_EQ(sidecar.at("seed"), 3);
  EXPECT_TRUE(sidecar.contains("operator_policy"));
}

TEST_F(CliTest, OverridesWinOverFile) {
  auto j = tiny();
  j["trials"] = 100;
  const auto r = invoke({"sweep", "--config", write_config(j), "--output", dir_.string(), "trials=1",
                         "algorithms=[\"hihtp\"]", "sparsity.flat.sigma=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(dir_ / "sweep.csv"), 3u);
  std::ifstream side(dir_ / "sweep.json");
  EXPECT_EQ(Json::parse(side).at("config").at("sparsity").at("flat").at("sigma"), 1);
}

TEST(ApplyOverrides, ParsesValues) {
  Json j = Json::parse(R"({"a": {"b": 1}, "c": "x"})");
  cli::apply_overrides(j, {"a.b=2.5", "c=hello", "d=true"});
  EXPECT_EQ(j["a"]["b"], 2.5);
  EXPECT_EQ(j["c"], "hello");
  EXPECT_EQ(j["d"], true);
  EXPECT_THROW(cli::apply_overrides(j, {"novalue"}), FormatError);
}

TEST(RipBoundCommand, ReferenceDimensions) {
  const auto r = invoke({"rip-bound", "--N", "30", "--n", "100", "--s", "4", "--sigma", "20",
                         "--delta", "0.577", "--epsilon", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2037"), std::string::npos);
  EXPECT_NE(r.out.find("3366"), std::string::npos);
  EXPECT_NE(r.out.find("saves 1329"), std::string::npos);
}

TEST(RipBoundCommand, MonotoneInDeltaAndDomainErrors) {
  Index previous = 0;
  for (const char* delta : {"0.9", "0.6", "0.3", "0.1"}) {
    cli::RipBoundArgs args;
    args.sparsity = {30, 100, 4, 20, {}};
    args.delta = std::stod(delta);
    const auto file = fs::temp_directory_path() / "hisparse_rip_bound.csv";
    args.output = file.string();
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_rip_bound(args, out, err), 0);
    std::ifstream in(file);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    const Index m = std::stoull(row.substr(row.rfind(',') + 1));
    EXPECT_GT(m, previous);
    previous = m;
    fs::remove(file);
  }
  EXPECT_EQ(invoke({"rip-bound", "--N", "3", "--n", "3", "--s", "1", "--sigma", "1", "--delta", "1.5"}).code, 3);
  EXPECT_EQ(invoke({"rip-bound", "--N", "3", "--n", "3", "--s", "4", "--sigma", "1"}).code, 3);
}

TEST(RipBoundCommand, TreeLevels) {
  const auto r = invoke({"rip-bound", "--levels", "10:3,8:2,16:4", "--delta", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("d=1280 k=24"), std::string::npos);
}

TEST(RipEstimateCommand, ExhaustiveAndSampled) {
  auto r = invoke({"rip-estimate", "--N", "4", "--n", "3", "--s", "2", "--sigma", "1", "--m", "8",
                   "--exhaustive"});
  EXPECT_EQ(r.code, 0) << r.err;
  r = invoke({"rip-estimate", "--N", "8", "--n", "8", "--s", "2", "--sigma", "2", "--m", "32",
              "--ensemble", "fourier_uniform", "--trials", "50"});
  EXPECT_EQ(r.code, 0) << r.err;
  r = invoke({"rip-estimate", "--N", "4", "--n", "10", "--s", "2", "--sigma", "5", "--m", "8",
              "--exhaustive", "--cap", "10"});
  EXPECT_EQ(r.code, 3);
}

TEST(OracleCheckCommand, PassesAndIsDeterministic) {
  const auto a = invoke({"oracle-check", "--cases", "40"});
  EXPECT_EQ(a.code, 0) << a.out << a.err;
  const auto b = invoke({"oracle-check", "--cases", "40"});
  EXPECT_EQ(a.out, b.out);
}

TEST(OracleCheckCommand, DefaultRunPasses) {
  const auto r = invoke({"oracle-check"});
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(OracleCheckCommand, InjectedFaultIsCaught) {
  const auto r = invoke({"oracle-check", "--cases", "40", "--inject-fault"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("reproduce with"), std::string::npos);
}

TEST(DemoCommand, Runs) {
  const auto r = invoke({"demo"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("hihtp"), std::string::npos);
}
