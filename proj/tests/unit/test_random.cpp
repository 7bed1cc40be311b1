#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <stdexcept>
#include <vector>

#include "fbst/random.hpp"

namespace {

TEST(Random, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(fbst::derive_seed(7, 1, 2), fbst::derive_seed(7, 1, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(fbst::derive_seed(123, a, b));
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_NE(fbst::derive_seed(1, 2, 3), fbst::derive_seed(1, 3, 2));
}

TEST(Random, HaltonPointsFillTheCube) {
  constexpr std::size_t n = 4096;
  std::vector<int> bins(16, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd u = fbst::halton_point(i, 2, 99);
    ASSERT_GE(u.minCoeff(), 0.0);
    ASSERT_LT(u.maxCoeff(), 1.0);
    ++bins[static_cast<std::size_t>(u[0] * 4) * 4 + static_cast<std::size_t>(u[1] * 4)];
  }
  for (int count : bins) EXPECT_NEAR(count, 256, 8);
}

TEST(Random, ParallelForVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  fbst::parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Random, ParallelForPropagatesExceptions) {
  EXPECT_THROW(fbst::parallel_for(100, 3,
                                  [](std::size_t i) {
                                    if (i == 57) throw std::runtime_error("boom");
                                  }),
               std::runtime_error);
}

}  // namespace
