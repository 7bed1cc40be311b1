#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Core>

namespace fbst {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Child seed for stream (a, b) of a parent seed. Stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Halton point with a Cranley-Patterson rotation taken from `seed`.
/// Coordinates lie in [0,1)^dim.
Eigen::VectorXd halton_point(std::size_t index, std::size_t dim, std::uint64_t seed);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
/// write to disjoint outputs; the schedule does not affect results.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

std::size_t default_thread_count();

}  // namespace fbst
