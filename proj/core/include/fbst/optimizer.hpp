#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "fbst/hypothesis.hpp"
#include "fbst/reference.hpp"

namespace fbst {

struct OptimizerOptions {
  std::size_t starts = 16;
  /// Function-evaluation budget per start.
  std::size_t max_evaluations = 10000;
  std::uint64_t seed = 0;
};

enum class OptimumStatus { converged, budget_exhausted };

enum class ConstrainedRoute { automatic, embedding, penalty };

std::string_view to_string(OptimumStatus status);
std::string_view to_string(ConstrainedRoute route);
ConstrainedRoute route_from_string(std::string_view name);

struct OptimumReport {
  Point maximizer;
  double log_value = -kInf;
  OptimumStatus status = OptimumStatus::converged;
  std::size_t restarts = 0;
  double constraint_residual = 0.0;
  std::size_t evaluations = 0;
  ConstrainedRoute route = ConstrainedRoute::automatic;
};

/// log s-hat = sup over Theta of log s, by seeded multi-start local search
/// in free coordinates.
OptimumReport sup_surprise_global(const SurpriseFunction& sf, const OptimizerOptions& options = {});

/// log s* = sup over H of log s. The embedding route maximizes over the
/// embedding domain; the penalty route runs an augmented Lagrangian over the
/// ambient space. `automatic` prefers the embedding when one exists.
/// Throws OptimizationError when no feasible point is found.
OptimumReport sup_surprise_hypothesis(const SurpriseFunction& sf, const Hypothesis& hypothesis,
                                      const OptimizerOptions& options = {},
                                      ConstrainedRoute route = ConstrainedRoute::automatic);

}  // namespace fbst
