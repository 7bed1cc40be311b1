#include <gtest/gtest.h>

#include <cmath>

#include "fbst/local_search.hpp"
#include "fbst/parameter_space.hpp"

namespace {

using fbst::search::maximize_1d;
using fbst::search::nelder_mead;
using fbst::search::newton_polish;

TEST(NelderMead, MaximizesNegatedRosenbrock) {
  auto f = [](const Eigen::VectorXd& x) {
    return -(100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2));
  };
  const auto r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(0.5, 0.5));
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
  EXPECT_GT(r.value, -1e-10);
}

TEST(NelderMead, RespectsDomainEncodedAsMinusInfinity) {
  // Unconstrained maximum at (2, 2) lies outside the unit box.
  auto f = [](const Eigen::VectorXd& x) {
    if ((x.array() < 0).any() || (x.array() > 1).any()) return -fbst::kInf;
    return -(x - Eigen::Vector2d(2, 2)).squaredNorm();
  };
  const auto r = nelder_mead(f, Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.2, 0.2));
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(NewtonPolish, RefinesAQuadratic) {
  auto f = [](const Eigen::VectorXd& x) {
    return -(3 * std::pow(x[0] - 0.3, 2) + std::pow(x[1] + 0.7, 2) + (x[0] - 0.3) * (x[1] + 0.7));
  };
  const Eigen::Vector2d start(0.31, -0.69);
  const auto r = newton_polish(f, start, f(start));
  EXPECT_NEAR(r.x[0], 0.3, 1e-9);
  EXPECT_NEAR(r.x[1], -0.7, 1e-9);
  EXPECT_GE(r.value, f(start));
}

TEST(NewtonPolish, LeavesNonConcavePointsAlone) {
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  const Eigen::Vector2d start(0.1, 0.2);
  const auto r = newton_polish(f, start, f(start));
  EXPECT_EQ(r.x, Eigen::VectorXd(start));
}

TEST(Maximize1d, InteriorAndBoundaryOptima) {
  const auto inner = maximize_1d([](double x) { return -std::pow(x - 0.7, 2); }, 0, 1, 0.1, 0.05);
  EXPECT_NEAR(inner.x[0], 0.7, 1e-7);
  const auto edge = maximize_1d([](double x) { return x; }, 0, 1, 0.5, 0.1);
  EXPECT_NEAR(edge.x[0], 1.0, 1e-7);
  const auto unbounded =
      maximize_1d([](double x) { return -std::pow(x - 40.0, 2); }, -fbst::kInf, fbst::kInf, 0, 1);
  EXPECT_NEAR(unbounded.x[0], 40.0, 1e-6);
}

TEST(Maximize1d, StartOutsideTheDomainOfFiniteValues) {
  auto f = [](double x) { return x < 0.8 ? -fbst::kInf : -std::pow(x - 0.9, 2); };
  const auto r = maximize_1d(f, 0, 1, 0.1, 0.05);
  EXPECT_NEAR(r.x[0], 0.9, 1e-6);
}

}  // namespace
