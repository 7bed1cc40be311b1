#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "fbst/asymptotics.hpp"
#include "fbst/hypothesis.hpp"
#include "fbst/integrator.hpp"
#include "fbst/optimizer.hpp"
#include "fbst/reference.hpp"
#include "fbst/sampling.hpp"

namespace fbst {

enum class IntegrationRoute { automatic, direct, mcmc, quadrature };

std::string_view to_string(IntegrationRoute route);
IntegrationRoute integration_route_from_string(std::string_view name);

struct EvaluationSettings {
  IntegrationRoute integration = IntegrationRoute::automatic;
  std::size_t draws = 100000;
  std::uint64_t seed = 1;
  McmcTuning tuning;
  OptimizerOptions optimizer;
  ConstrainedRoute route = ConstrainedRoute::automatic;
  DecisionThresholds thresholds;
  std::size_t threads = 1;
  /// Keep the truth function so callers can export the W curve.
  bool keep_truth_function = false;
};

/// Relative gap under which s* is taken to equal s-hat: the hypothesis
/// attains the maximal surprise and T(s*) = Theta.
inline constexpr double kModeAttainmentTolerance = 1e-10;

struct Evaluation {
  OptimumReport global;
  OptimumReport constrained;
  double log_s_star = -kInf;
  double log_s_hat = -kInf;
  bool mode_attained = false;
  EvalEstimate estimate;
  IntegrationRoute integration = IntegrationRoute::automatic;
  std::size_t t = 0;
  std::size_t h = 0;
  std::optional<double> sev;
  std::optional<Decision> decision;
  std::optional<double> effective_size;
  std::optional<McmcDiagnostics> mcmc;
  std::optional<TruthFunction> truth;
};

/// Full test: optimization step (s-hat, s*), integration step (ev = W(s*)),
/// standardization and decision. sev and the decision are only produced for
/// hypotheses with at least one equality constraint.
Evaluation evaluate(const SurpriseFunction& sf, const Hypothesis& hypothesis,
                    const EvaluationSettings& settings = {});

}  // namespace fbst
