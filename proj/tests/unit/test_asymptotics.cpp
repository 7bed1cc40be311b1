#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fbst/asymptotics.hpp"
#include "fbst/errors.hpp"
#include "fbst/parameter_space.hpp"
#include "oracles.hpp"

namespace {

using namespace fbst;

TEST(ChiSquare, ClosedFormOracles) {
  EXPECT_NEAR(chi2_cdf(2, 2 * std::log(2.0)), 0.5, 1e-15);
  EXPECT_NEAR(chi2_cdf(1, 1.3863), 2 * 0.5 * std::erfc(-std::sqrt(1.3863) / std::sqrt(2.0)) - 1,
              1e-14);
  EXPECT_NEAR(chi2_cdf(1, 1.3863), 0.7609690638601031, 1e-12);
}

TEST(ChiSquare, AgreesWithRecurrenceOracleOnAGrid) {
  for (std::size_t k = 1; k <= 8; ++k) {
    for (double x = 0.05; x < 30.0; x *= 1.3) {
      EXPECT_NEAR(chi2_cdf(k, x), oracle::chi2_cdf(k, x), 1e-13) << "k=" << k << " x=" << x;
    }
  }
}

TEST(ChiSquare, Boundaries) {
  for (std::size_t k = 1; k <= 5; ++k) {
    EXPECT_EQ(chi2_cdf(k, 0.0), 0.0);
    EXPECT_EQ(chi2_quantile(k, 0.0), 0.0);
    EXPECT_EQ(chi2_quantile(k, 1.0), kInf);
  }
  EXPECT_EQ(chi2_cdf(0, 0.0), 1.0);
  EXPECT_EQ(chi2_cdf(0, 3.0), 1.0);
  EXPECT_EQ(chi2_quantile(0, 0.7), 0.0);
  EXPECT_EQ(chi2_cdf(3, -1.0), 0.0);
  EXPECT_THROW(chi2_quantile(2, 1.5), ValidationError);
  EXPECT_THROW(chi2_quantile(2, -0.1), ValidationError);
}

TEST(ChiSquare, QuantileInvertsCdf) {
  for (std::size_t k = 1; k <= 6; ++k) {
    for (double c = 0.01; c < 1.0; c += 0.049) {
      const double x = chi2_quantile(k, c);
      EXPECT_NEAR(chi2_cdf(k, x), c, 1e-10 * c);
      EXPECT_NEAR(x, oracle::chi2_quantile(k, c), 1e-10 * std::max(1.0, x));
    }
  }
}

TEST(QQ, ChainedOracle) {
  const double expected = oracle::chi2_cdf(1, oracle::chi2_quantile(2, 0.5));
  EXPECT_NEAR(expected, 0.7609681085504881, 1e-12);
  EXPECT_NEAR(qq_confidence(2, 1, 0.5), expected, 1e-12);
  EXPECT_NEAR(qq_confidence(2, 1, 0.5), 0.7610, 1e-4);
}

TEST(QQ, IdentityWhenHypothesisIsAPoint) {
  for (std::size_t t = 1; t <= 4; ++t)
    for (int i = 0; i <= 100; ++i) {
      const double c = i / 100.0;
      EXPECT_NEAR(qq_confidence(t, 0, c), c, 1e-10);
    }
}

TEST(QQ, BoundariesAndMonotonicity) {
  for (std::size_t t = 1; t <= 4; ++t) {
    for (std::size_t h = 0; h <= t; ++h) {
      EXPECT_EQ(qq_confidence(t, h, 0.0), 0.0);
      EXPECT_EQ(qq_confidence(t, h, 1.0), 1.0);
      double previous = 0.0;
      for (double c = 0.0; c <= 1.0; c += 0.01) {
        const double q = qq_confidence(t, h, c);
        EXPECT_GE(q, previous - 1e-15);
        EXPECT_LE(q, 1.0);
        previous = q;
      }
    }
  }
  EXPECT_EQ(qq_confidence(3, 3, 0.2), 1.0);
  EXPECT_THROW(qq_confidence(2, 3, 0.5), ValidationError);
  EXPECT_THROW(qq_confidence(0, 0, 0.5), ValidationError);
}

TEST(QQ, InverseRoundTrip) {
  for (std::size_t t = 1; t <= 4; ++t)
    for (std::size_t h = 0; h < t; ++h)
      for (double c = 0.0; c <= 1.0; c += 0.02) {
        EXPECT_NEAR(qq_inverse(t, h, qq_confidence(t, h, c)), c, 1e-8);
      }
  EXPECT_THROW(qq_inverse(2, 2, 0.5), ValidationError);
}

TEST(StandardizedEvalue, Examples) {
  EXPECT_EQ(standardized_evalue(2, 1, 0.0), 1.0);
  EXPECT_EQ(standardized_evalue(2, 1, 1.0), 0.0);
  EXPECT_NEAR(standardized_evalue(2, 1, 0.5), 1 - 0.7609681085504881, 1e-12);
  EXPECT_NEAR(standardized_evalue(2, 1, 0.5), 0.2390, 1e-4);
  for (double ev : {0.1, 0.242, 0.9}) EXPECT_NEAR(standardized_evalue(1, 0, 1 - ev), ev, 1e-10);
  EXPECT_THROW(standardized_evalue(2, 2, 0.5), ValidationError);
}

TEST(StandardizedEvalue, DecreasingInEvBar) {
  double previous = 1.0;
  for (double e = 0.0; e <= 1.0; e += 0.01) {
    const double sev = standardized_evalue(3, 1, e);
    EXPECT_LE(sev, previous + 1e-15);
    previous = sev;
  }
}

TEST(Decision, HalfOpenIntervals) {
  EXPECT_EQ(decide(0.242).verdict, Verdict::neutral);
  EXPECT_EQ(decide(0.01).verdict, Verdict::reject);
  EXPECT_EQ(decide(0.95).verdict, Verdict::accept);
  EXPECT_EQ(decide(0.05).verdict, Verdict::neutral);
  EXPECT_EQ(decide(std::nextafter(0.05, 0.0)).verdict, Verdict::reject);
  EXPECT_EQ(decide(std::nextafter(0.95, 0.0)).verdict, Verdict::neutral);
  EXPECT_EQ(decide(1.0).verdict, Verdict::accept);
  EXPECT_EQ(decide(0.0).verdict, Verdict::reject);
  const Decision d = decide(0.3, {0.2, 0.4});
  EXPECT_EQ(d.verdict, Verdict::neutral);
  EXPECT_EQ(d.sev, 0.3);
  EXPECT_EQ(d.thresholds.c2, 0.4);
  EXPECT_EQ(to_string(Verdict::accept), "accept");
}

TEST(Decision, ThresholdsAreValidated) {
  EXPECT_THROW(decide(0.5, {0.5, 0.4}), ValidationError);
  EXPECT_THROW(decide(0.5, {0.0, 0.4}), ValidationError);
  EXPECT_THROW(decide(0.5, {0.1, 1.0}), ValidationError);
  EXPECT_THROW(decide(1.5), ValidationError);
}

TEST(Disjunction, MaximumOfSupports) {
  const std::vector<double> a{0.3, 0.7};
  EXPECT_EQ(disjunction_evalue(a), 0.7);
  const std::vector<double> single{0.42};
  EXPECT_EQ(disjunction_evalue(single), 0.42);
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  EXPECT_EQ(disjunction_evalue(zeros), 0.0);
  EXPECT_THROW(disjunction_evalue(std::vector<double>{}), ValidationError);
  EXPECT_THROW(disjunction_evalue(std::vector<double>{0.2, 1.2}), ValidationError);
}

TEST(KolmogorovSmirnov, MatchesBruteForceSupremum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(200);
  for (auto& x : xs) x = u(rng) * u(rng);
  // sup |F_n(x) - x| is attained at sample points, approached from either side.
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  double brute = 0.0;
  for (double x : sorted) {
    const double below = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), x) -
                                             sorted.begin()) / 200.0;
    const double at = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                                          sorted.begin()) / 200.0;
    brute = std::max({brute, std::abs(at - x), std::abs(below - x)});
  }
  EXPECT_NEAR(ks_uniform_statistic(xs), brute, 1e-15);
  const std::vector<double> exact{0.125, 0.375, 0.625, 0.875};
  EXPECT_NEAR(ks_uniform_statistic(exact), 0.125, 1e-15);
}

}  // namespace
