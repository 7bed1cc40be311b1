#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string command = std::string(FBST_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buffer{};
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) r.out.append(buffer.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(FBST_CONFIG_DIR) + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fbst_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, TestCommandWritesReport) {
  const Result r = run("test --spec " + config("beta_point.json") + " --out " + path("r.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path("r.json"));
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["report"]["decision"], "neutral");
  EXPECT_NEAR(j["report"]["ev"].get<double>(), 0.2423, 0.005);
  EXPECT_TRUE(j["runtime"].contains("wall_clock_seconds"));
}

TEST_F(Cli, RerunsAreIdentical) {
  for (const char* cmd : {"test", "calibrate", "consistency", "invariance"}) {
    SCOPED_TRACE(cmd);
    const std::string spec = std::string(cmd) == "test"        ? config("beta_point.json")
                             : std::string(cmd) == "invariance" ? config("beta_point_quadrature.json")
                                                                : config("bernoulli_calibration.json");
    const Result a = run(std::string(cmd) + " --spec " + spec);
    const Result b = run(std::string(cmd) + " --spec " + spec);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    if (std::string(cmd) == "test" || std::string(cmd) == "invariance") {
      auto ja = nlohmann::json::parse(a.out);
      auto jb = nlohmann::json::parse(b.out);
      ja.erase("runtime");
      jb.erase("runtime");
      EXPECT_EQ(ja.dump(), jb.dump());
    } else {
      EXPECT_EQ(a.out, b.out);
    }
  }
}

TEST_F(Cli, SeedOverrideChangesMonteCarloResult) {
  const Result a = run("test --format csv --seed 1 --spec " + config("beta_point.json"));
  const Result b = run("test --format csv --seed 2 --spec " + config("beta_point.json"));
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')),
            "ev,ev_bar,standard_error,s_star,s_hat,t,h,sev,decision,seed");
}

TEST_F(Cli, MalformedSpecExitsTwoWithoutOutput) {
  const std::string bad = write("bad.json", R"({"schema_version": 1, "model": 3})");
  const Result r = run("test --spec " + bad + " --out " + path("r.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(fs::exists(path("r.json")));
  const std::string not_json = write("broken.json", "{ nope");
  EXPECT_EQ(run("test --spec " + not_json).code, 2);
  EXPECT_EQ(run("test --spec " + path("absent.json")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, InapplicableMapExitsTwo) {
  const Result r = run("invariance --map affine --spec " + config("hardy_weinberg.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, ZeroReplicatesExitsTwo) {
  const std::string spec = write("zero.json", R"({
    "schema_version": 1,
    "model": {"family": "beta_binomial", "prior": {"a": 1, "b": 1}},
    "hypothesis": {"type": "point", "fix": {"theta": 0.5}},
    "calibration": {"n_grid": [50], "replicates": 0, "theta0": [0.5]}
  })");
  EXPECT_EQ(run("consistency --spec " + spec).code, 2);
}

TEST_F(Cli, CalibrationCsvShape) {
  const Result r = run("calibrate --spec " + config("bernoulli_calibration.json"));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,c_n,replicates,seed");
  int rows = 0;
  while (std::getline(in, line)) {
    const double c = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST_F(Cli, QqTable) {
  const Result r = run("qq --t 2 --h 0,1 --points 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "c,qq_t2_h0,qq_t2_h1");
  const Result j = run("qq --t 2 --h 1 --points 5 --format json");
  ASSERT_EQ(j.code, 0);
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["qq"].size(), 5u);
  EXPECT_EQ(run("qq --t 1 --h 2").code, 2);
}

TEST_F(Cli, WritesWCurveFromSpec) {
  const std::string spec = write("hw.json", R"({
    "schema_version": 1,
    "model": {"family": "dirichlet_multinomial", "prior": {"alpha": [1, 1, 1]},
              "data": {"counts": [5, 2, 3]}},
    "hypothesis": {"type": "hardy_weinberg"},
    "sampling": {"draws": 5000, "seed": 2},
    "output": {"report": ")" + path("hw_report.json") + R"(", "w_curve": ")" +
                                     path("hw_w.csv") + R"("}
  })");
  ASSERT_EQ(run("test --spec " + spec).code, 0);
  EXPECT_TRUE(fs::exists(path("hw_report.json")));
  std::ifstream in(path("hw_w.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "v,W");
}

TEST_F(Cli, HelpAndVersion) {
  EXPECT_EQ(run("--help").code, 0);
  const Result v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_FALSE(v.out.empty());
}

}  // namespace
