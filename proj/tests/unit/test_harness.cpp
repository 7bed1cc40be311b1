#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbst/errors.hpp"
#include "fbst/harness.hpp"

namespace {

using namespace fbst;
using nlohmann::json;

json beta_spec() {
  return json::parse(R"({
    "schema_version": 1,
    "model": {"family": "beta_binomial", "prior": {"a": 1, "b": 1},
              "data": {"successes": 3, "trials": 4}},
    "reference": "uniform",
    "hypothesis": {"type": "point", "fix": {"theta": 0.5}},
    "sampling": {"method": "direct", "draws": 20000, "seed": 5}
  })");
}

TEST(ParseSpec, ValidDocument) {
  const TestSpec spec = parse_test_spec(beta_spec());
  EXPECT_EQ(std::get<BetaParams>(spec.prior), (BetaParams{1, 1}));
  EXPECT_EQ(spec.data, DataSet::binomial(3, 4));
  EXPECT_EQ(spec.hypothesis.type, "point");
  ASSERT_EQ(spec.hypothesis.fix.size(), 1u);
  EXPECT_EQ(spec.hypothesis.fix[0].first, "theta");
  EXPECT_EQ(spec.settings.integration, IntegrationRoute::direct);
  EXPECT_EQ(spec.settings.draws, 20000u);
  EXPECT_EQ(spec.settings.seed, 5u);
  EXPECT_EQ(spec.settings.optimizer.seed, 5u);
  EXPECT_FALSE(spec.study.has_value());
}

TEST(ParseSpec, SeedAcceptsSignedNonnegativeIntegers) {
  json d = beta_spec();
  d["sampling"]["seed"] = std::int64_t{42};
  EXPECT_EQ(parse_test_spec(d).settings.seed, 42u);
  d["sampling"]["seed"] = std::int64_t{-1};
  EXPECT_THROW(parse_test_spec(d), ValidationError);
}

TEST(ParseSpec, ShippedConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(FBST_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(load_test_spec(entry.path()));
  }
}

TEST(ParseSpec, RejectsMalformedDocuments) {
  auto expect_invalid = [](json doc, const std::string& fragment) {
    try {
      parse_test_spec(doc);
      ADD_FAILURE() << "accepted: " << doc.dump();
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  json d = beta_spec();
  d["schema_version"] = 2;
  expect_invalid(d, "schema_version");
  d = beta_spec();
  d["colour"] = "blue";
  expect_invalid(d, "colour");
  d = beta_spec();
  d["model"]["prior"]["a"] = -1;
  expect_invalid(d, "");
  d = beta_spec();
  d["model"]["family"] = "weibull";
  expect_invalid(d, "model.family");
  d = beta_spec();
  d["hypothesis"]["type"] = "interval";
  expect_invalid(d, "hypothesis.type");
  d = beta_spec();
  d["sampling"]["draws"] = 0;
  expect_invalid(d, "sampling.draws");
  d = beta_spec();
  d["sampling"]["method"] = "gibbs";
  expect_invalid(d, "sampling.method");
  d = beta_spec();
  d["decision"] = {{"c1", 0.9}, {"c2", 0.1}};
  expect_invalid(d, "decision");
  d = beta_spec();
  d["model"]["data"] = {{"successes", 5}, {"trials", 4}};
  expect_invalid(d, "");
  d = beta_spec();
  d.erase("hypothesis");
  expect_invalid(d, "hypothesis");
  expect_invalid(json::array(), "object");
}

TEST(ParseSpec, UnknownLabelInHypothesis) {
  json d = beta_spec();
  d["hypothesis"]["fix"] = {{"p", 0.5}};
  const TestSpec spec = parse_test_spec(d);
  EXPECT_THROW(run_test(spec), ValidationError);
}

TEST(RunTest, ReportIsConsistent) {
  const RunOutput out = run_test(parse_test_spec(beta_spec()));
  const EvalReport& r = out.report;
  EXPECT_EQ(r.version, version_string());
  EXPECT_EQ(r.family, "beta_binomial");
  EXPECT_EQ(r.labels, std::vector<std::string>{"theta"});
  EXPECT_EQ(r.theta_star, std::vector<double>{0.5});
  EXPECT_NEAR(r.s_star, 1.25, 1e-12);
  EXPECT_NEAR(r.theta_hat[0], 0.75, 1e-7);
  EXPECT_DOUBLE_EQ(r.ev + r.ev_bar, 1.0);
  EXPECT_NEAR(r.ev, 0.24230634020817998, 3 * r.standard_error);
  EXPECT_EQ(r.decision, "neutral");
  EXPECT_EQ(r.draws, 20000u);
  EXPECT_EQ(r.seed, 5u);
  EXPECT_FALSE(out.w_curve_csv.has_value());
}

TEST(RunTest, HashableSectionIsDeterministic) {
  const TestSpec spec = parse_test_spec(beta_spec());
  const EvalReport a = run_test(spec).report;
  const EvalReport b = run_test(spec).report;
  EXPECT_EQ(hashable_section(a).dump(), hashable_section(b).dump());
  EXPECT_FALSE(hashable_section(a).contains("wall_clock_seconds"));
}

TEST(RunTest, ReportRoundTripsThroughJson) {
  json d = beta_spec();
  d["model"] = json::parse(R"({"family": "dirichlet_multinomial", "prior": {"alpha": [1, 1, 1]},
                               "data": {"counts": [5, 2, 3]}})");
  d["hypothesis"] = {{"type", "hardy_weinberg"}};
  d["sampling"]["method"] = "mcmc";
  d["output"] = {{"w_curve", "w.csv"}};
  const RunOutput out = run_test(parse_test_spec(d));
  ASSERT_TRUE(out.w_curve_csv.has_value());
  ASSERT_TRUE(out.report.sampler.acceptance_rate.has_value());
  const std::string text = to_json(out.report).dump(2);
  const EvalReport back = eval_report_from_json(json::parse(text));
  EXPECT_EQ(back, out.report);
}

TEST(RunTest, MissingDataIsRejected) {
  json d = beta_spec();
  d["model"].erase("data");
  EXPECT_THROW(run_test(parse_test_spec(d)), ValidationError);
}

TEST(Invariance, IdentityMapIsExact) {
  const InvarianceResult r = run_invariance_check(parse_test_spec(beta_spec()), "identity");
  EXPECT_EQ(r.delta_ev, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.original.ev, r.transformed.ev);
}

TEST(Invariance, LogOddsQuadrature) {
  json d = beta_spec();
  d["sampling"]["method"] = "quadrature";
  const InvarianceResult r = run_invariance_check(parse_test_spec(d), "log_odds");
  EXPECT_LT(r.delta_ev, 1e-5);
  EXPECT_EQ(r.tolerance, 1e-5);
  EXPECT_TRUE(r.passed);
  const json j = to_json(r);
  EXPECT_EQ(j["invariance"]["map"], "log_odds");
  EXPECT_TRUE(j["invariance"]["passed"].get<bool>());
}

TEST(Invariance, AffineOnSimplexIsRejected) {
  json d = beta_spec();
  d["model"] = json::parse(R"({"family": "dirichlet_multinomial", "prior": {"alpha": [1, 1, 1]},
                               "data": {"counts": [5, 2, 3]}})");
  d["hypothesis"] = {{"type", "hardy_weinberg"}};
  EXPECT_THROW(run_invariance_check(parse_test_spec(d), "affine"), ValidationError);
}

TEST(QqTable, Layout) {
  const std::string csv = qq_table_csv(2, {0, 1}, 3);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "c,qq_t2_h0,qq_t2_h1");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,0");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "0.5,0.5,");
  EXPECT_NEAR(std::stod(line.substr(8)), 0.7609681085504881, 1e-12);
  EXPECT_THROW(qq_table_csv(2, {3}, 3), ValidationError);
  EXPECT_THROW(qq_table_csv(2, {1}, 1), ValidationError);
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "fbst_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.json";
  write_file_atomically(path, "first");
  write_file_atomically(path, "second");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(content, "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_THROW(write_file_atomically(dir / "missing" / "x.json", "x"), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
