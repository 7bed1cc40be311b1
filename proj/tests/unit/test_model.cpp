#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fbst/errors.hpp"
#include "fbst/model.hpp"
#include "oracles.hpp"

namespace {

using namespace fbst;

Point scalar(double x) { return Point::Constant(1, x); }

TEST(ConjugateUpdate, BetaCountingIdentity) {
  const auto post = update_hyperparameters(BetaParams{1, 1}, DataSet::binomial(3, 4));
  EXPECT_EQ(std::get<BetaParams>(post), (BetaParams{4, 2}));
}

TEST(ConjugateUpdate, DirichletCountingIdentity) {
  const auto post =
      update_hyperparameters(DirichletParams{{1, 1, 1}}, DataSet::multinomial({5, 2, 3}));
  EXPECT_EQ(std::get<DirichletParams>(post).alpha, (std::vector<double>{6, 3, 4}));
}

TEST(ConjugateUpdate, SequentialBatchesEqualPooledData) {
  const auto seq = update_hyperparameters(
      update_hyperparameters(BetaParams{1, 1}, DataSet::binomial(1, 2)), DataSet::binomial(2, 2));
  EXPECT_EQ(std::get<BetaParams>(seq), (BetaParams{4, 2}));

  const auto pooled = update_hyperparameters(GammaParams{2, 1}, DataSet::poisson(9, 5.0));
  const auto split = update_hyperparameters(
      update_hyperparameters(GammaParams{2, 1}, DataSet::poisson(4, 2.0)),
      DataSet::poisson(5, 3.0));
  EXPECT_EQ(std::get<GammaParams>(pooled), std::get<GammaParams>(split));
}

TEST(ConjugateUpdate, NormalInverseGammaMatchesTextbookFormulas) {
  const NormalInverseGammaParams prior{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> xs{0.5, 1.5, 2.0, -0.25, 1.0};
  const DataSet data = DataSet::from_observations(Family::normal_mean_variance, xs);
  const auto post = std::get<NormalInverseGammaParams>(update_hyperparameters(prior, data));

  const double n = 5.0;
  double mean = 0.0;
  for (double x : xs) mean += x / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(post.kappa, 7.0, 1e-12);
  EXPECT_NEAR(post.mean, (2.0 * 1.0 + n * mean) / 7.0, 1e-12);
  EXPECT_NEAR(post.shape, 3.0 + n / 2.0, 1e-12);
  EXPECT_NEAR(post.scale, 4.0 + 0.5 * ss + 2.0 * n * (mean - 1.0) * (mean - 1.0) / (2.0 * 7.0),
              1e-12);
}

TEST(ConjugateUpdate, FamilyMismatchAndBadHyperparametersThrow) {
  EXPECT_THROW(update_hyperparameters(BetaParams{1, 1}, DataSet::multinomial({1, 2})),
               ValidationError);
  EXPECT_THROW(conjugate_posterior_update(BetaParams{0, 1}, DataSet::binomial(1, 2)),
               ValidationError);
  EXPECT_THROW(DataSet::binomial(3, 2), ValidationError);
  EXPECT_THROW(DataSet::binomial(0, 0), ValidationError);
  EXPECT_THROW(DataSet::multinomial({-1, 2}), ValidationError);
}

TEST(LogPotential, BetaDifferenceMatchesClosedForm) {
  const auto model = PosteriorModel::from_hyperparameters(BetaParams{4, 2});
  const double expected = std::log(20 * 0.125 * 0.5) - std::log(20 * 0.015625 * 0.75);
  EXPECT_NEAR(log_posterior_potential(model, scalar(0.5)) -
                  log_posterior_potential(model, scalar(0.25)),
              expected, 1e-12);
  EXPECT_NEAR(expected, 1.6739764335716716, 1e-12);
}

TEST(LogPotential, OffSupportAndBoundary) {
  const auto model = PosteriorModel::from_hyperparameters(BetaParams{4, 2});
  EXPECT_EQ(model.log_potential(scalar(0.0)), -kInf);
  EXPECT_EQ(model.log_potential(scalar(-0.1)), -kInf);
  EXPECT_EQ(model.log_potential(scalar(1.2)), -kInf);
  EXPECT_THROW(model.log_potential(Point::Zero(2)), ValidationError);

  const auto dir = PosteriorModel::from_hyperparameters(DirichletParams{{6, 3, 4}});
  EXPECT_TRUE(std::isfinite(dir.log_potential(Point::Constant(3, 1.0 / 3.0))));
  EXPECT_EQ(dir.log_potential(Point{{0.5, 0.5, 0.5}}), -kInf);
}

TEST(LogPotential, MatchesIndependentDensities) {
  const auto beta = PosteriorModel::from_hyperparameters(BetaParams{2.5, 7.0});
  const auto dir = PosteriorModel::from_hyperparameters(DirichletParams{{6, 3, 4}});
  for (double x : {0.05, 0.3, 0.77}) {
    EXPECT_NEAR(beta.log_potential(scalar(x)), oracle::beta_log_density(2.5, 7.0, x), 1e-11);
    const double y = 0.5 * (1 - x);
    EXPECT_NEAR(dir.log_potential(Point{{x, y, 1 - x - y}}),
                oracle::dirichlet3_log_density(6, 3, 4, x, y), 1e-11);
  }
}

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

TEST(LogPotential, BuiltInDensitiesAreNormalized) {
  const auto beta = PosteriorModel::from_hyperparameters(BetaParams{4, 2});
  EXPECT_NEAR(simpson([&](double x) { return std::exp(beta.log_potential(scalar(x))); }, 0, 1),
              1.0, 1e-6);
  const auto normal = PosteriorModel::from_hyperparameters(NormalParams{0.3, 0.2, 1.0});
  EXPECT_NEAR(simpson([&](double x) { return std::exp(normal.log_potential(scalar(x))); }, -5, 5),
              1.0, 1e-6);
  const auto gamma = PosteriorModel::from_hyperparameters(GammaParams{3.0, 2.0});
  EXPECT_NEAR(simpson([&](double x) { return std::exp(gamma.log_potential(scalar(x))); }, 0, 30),
              1.0, 1e-6);
  const auto nig = PosteriorModel::from_hyperparameters(NormalInverseGammaParams{0, 2, 3, 2});
  const double mass = simpson(
      [&](double s2) {
        return simpson([&](double mu) { return std::exp(nig.log_potential(Point{{mu, s2}})); },
                       -8, 8, 400);
      },
      1e-9, 400, 16000);
  EXPECT_NEAR(mass, 1.0, 1e-5);
}

TEST(FisherInformation, ClosedForms) {
  EXPECT_DOUBLE_EQ(fisher_information(Family::beta_binomial, scalar(0.5))(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(fisher_information(Family::gamma_poisson, scalar(2.0))(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(fisher_information(Family::normal_known_variance, scalar(3.0), 4.0)(0, 0),
                   0.25);
  for (double x : {0.1, 0.27, 0.4}) {
    EXPECT_DOUBLE_EQ(fisher_information(Family::beta_binomial, scalar(x))(0, 0),
                     fisher_information(Family::beta_binomial, scalar(1 - x))(0, 0));
  }
  EXPECT_THROW(fisher_information(Family::beta_binomial, scalar(0.0)), ValidationError);
}

TEST(FisherInformation, SymmetricPositiveDefiniteAtRandomInteriorPoints) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 100; ++i) {
    std::vector<Eigen::MatrixXd> gs;
    gs.push_back(fisher_information(Family::beta_binomial, scalar(u(rng))));
    const double a = u(rng), b = u(rng), c = u(rng);
    gs.push_back(
        fisher_information(Family::dirichlet_multinomial, Point{{a, b, c}} / (a + b + c)));
    gs.push_back(fisher_information(Family::normal_known_variance, scalar(10 * u(rng) - 5)));
    gs.push_back(fisher_information(Family::normal_mean_variance, Point{{u(rng), 5 * u(rng)}}));
    gs.push_back(fisher_information(Family::gamma_poisson, scalar(10 * u(rng))));
    for (const auto& g : gs) {
      EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-14);
      Eigen::LLT<Eigen::MatrixXd> llt(g);
      EXPECT_EQ(llt.info(), Eigen::Success);
    }
  }
}

TEST(SimulateData, DegenerateParameter) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const DataSet d = simulate_data(Family::beta_binomial, scalar(1.0), 10, seed);
    EXPECT_EQ(std::get<BinomialStats>(d.stats).successes, 10);
  }
}

TEST(SimulateData, DeterministicUnderSeed) {
  EXPECT_EQ(simulate_data(Family::beta_binomial, scalar(0.5), 10000, 42),
            simulate_data(Family::beta_binomial, scalar(0.5), 10000, 42));
  EXPECT_EQ(simulate_data(Family::dirichlet_multinomial, Point{{0.2, 0.3, 0.5}}, 500, 9),
            simulate_data(Family::dirichlet_multinomial, Point{{0.2, 0.3, 0.5}}, 500, 9));
}

TEST(SimulateData, BinomialConcentration) {
  int close = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DataSet d = simulate_data(Family::beta_binomial, scalar(0.3), 100000, seed);
    const double rate = static_cast<double>(std::get<BinomialStats>(d.stats).successes) / 1e5;
    close += std::abs(rate - 0.3) < 0.01 ? 1 : 0;
  }
  EXPECT_GE(close, 99);
}

TEST(SimulateData, OffSupportThetaThrows) {
  EXPECT_THROW(simulate_data(Family::beta_binomial, scalar(1.5), 10, 1), ValidationError);
  EXPECT_THROW(simulate_data(Family::gamma_poisson, scalar(-1.0), 10, 1), ValidationError);
}

TEST(DataSet, ObservationOrderDoesNotMatter) {
  std::vector<double> xs{0.1, 2.5, -1.3, 0.7, 1e-3, 3.14159, -2.0};
  const DataSet a = DataSet::from_observations(Family::normal_mean_variance, xs);
  std::reverse(xs.begin(), xs.end());
  std::swap(xs[1], xs[4]);
  const DataSet b = DataSet::from_observations(Family::normal_mean_variance, xs);
  EXPECT_EQ(a, b);

  const std::vector<double> cats{0, 2, 1, 2, 2, 0};
  const std::vector<double> shuffled{2, 2, 0, 1, 0, 2};
  EXPECT_EQ(DataSet::from_observations(Family::dirichlet_multinomial, cats, 3),
            DataSet::from_observations(Family::dirichlet_multinomial, shuffled, 3));
  EXPECT_EQ(DataSet::from_observations(Family::dirichlet_multinomial, cats, 3),
            DataSet::multinomial({2, 1, 3}));
}

}  // namespace
