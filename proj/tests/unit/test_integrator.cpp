#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fbst/errors.hpp"
#include "fbst/integrator.hpp"
#include "oracles.hpp"

namespace {

using namespace fbst;

struct BetaFixture : ::testing::Test {
  PosteriorModel model = PosteriorModel::from_hyperparameters(BetaParams{4, 2});
  SurpriseFunction sf{model, ReferenceDensity::uniform()};
  PosteriorSample sample = sample_posterior_direct(model, 100000, 99);
  TruthFunction w{sample, sf};
};

TEST_F(BetaFixture, TruthFunctionIsACdf) {
  const auto& sorted = w.sorted_log_surprise();
  ASSERT_EQ(sorted.size(), 100000u);
  EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end()));
  EXPECT_EQ(w(sorted.front() - 1e-9), 0.0);
  EXPECT_EQ(w(sorted.back()), 1.0);
  EXPECT_EQ(w(-kInf), 0.0);
  EXPECT_EQ(w(kInf), 1.0);
  double previous = 0.0;
  for (double v = -8.0; v <= 1.0; v += 0.01) {
    const double current = w(v);
    EXPECT_GE(current, previous);
    previous = current;
  }
  EXPECT_THROW(w(std::nan("")), ValidationError);
}

TEST_F(BetaFixture, TiesCountIntoTheSublevelSet) {
  const auto& sorted = w.sorted_log_surprise();
  const double v = sorted[4999];
  EXPECT_GE(w(v), 5000.0 / 1e5);
  EXPECT_LT(w(std::nextafter(v, -kInf)), w(v));
}

TEST_F(BetaFixture, TruthFunctionAtSurpriseOfHalf) {
  const double expected = oracle::beta_point_evalue(4, 2, 0.5).ev;
  const auto e = estimate_evalue(w, std::log(1.25), static_cast<double>(w.size()));
  EXPECT_NEAR(e.ev, expected, 3 * e.standard_error);
  EXPECT_DOUBLE_EQ(e.ev + e.ev_bar, 1.0);
  EXPECT_NEAR(e.standard_error, std::sqrt(e.ev * (1 - e.ev) / 1e5), 1e-15);
  EXPECT_EQ(e.method, IntegrationMethod::monte_carlo);
  EXPECT_EQ(e.draws, 100000u);
}

TEST_F(BetaFixture, DegenerateThresholds) {
  const auto none = estimate_evalue(w, -kInf, 1e5);
  EXPECT_EQ(none.ev, 0.0);
  EXPECT_EQ(none.standard_error, 0.0);
  const auto all = estimate_evalue(w, kInf, 1e5);
  EXPECT_EQ(all.ev, 1.0);
  EXPECT_EQ(all.ev_bar, 0.0);
  EXPECT_THROW(estimate_evalue(w, std::nan(""), 1e5), ValidationError);
  EXPECT_THROW(estimate_evalue(w, 0.0, 0.0), ValidationError);
}

TEST_F(BetaFixture, EffectiveSizeWidensTheStandardError) {
  const auto full = estimate_evalue(w, std::log(1.25), 1e5);
  const auto dependent = estimate_evalue(w, std::log(1.25), 2.5e4);
  EXPECT_EQ(full.ev, dependent.ev);
  EXPECT_NEAR(dependent.standard_error, 2 * full.standard_error, 1e-15);
}

TEST_F(BetaFixture, CurveCsvHasQuantileKnots) {
  std::ostringstream out;
  write_truth_curve_csv(out, w);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "v,W");
  int rows = 0;
  double last_v = -1.0, last_w = -1.0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double v = std::stod(line.substr(0, comma));
    const double wv = std::stod(line.substr(comma + 1));
    EXPECT_GE(v, last_v);
    EXPECT_GE(wv, last_w);
    last_v = v;
    last_w = wv;
    ++rows;
  }
  EXPECT_EQ(rows, 512);
  EXPECT_EQ(last_w, 1.0);
}

TEST(TruthFunction, RejectsMismatchedSample) {
  const auto model = PosteriorModel::from_hyperparameters(BetaParams{4, 2});
  const auto other = PosteriorModel::from_hyperparameters(DirichletParams{{1, 1, 1}});
  const auto sample = sample_posterior_direct(other, 10, 1);
  EXPECT_THROW(TruthFunction(sample, SurpriseFunction(model, ReferenceDensity::uniform())),
               ValidationError);
}

}  // namespace
