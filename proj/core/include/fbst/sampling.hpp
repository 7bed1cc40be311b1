#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fbst/model.hpp"

namespace fbst {

enum class SamplerKind { direct, mcmc };

std::string_view to_string(SamplerKind kind);

struct McmcTuning {
  /// Initial proposal scale relative to the search box width.
  double step_scale = 0.1;
  double burn_in_fraction = 0.1;
  std::size_t thin = 1;
  /// Acceptance band expected after adaptation.
  double min_acceptance = 0.2;
  double max_acceptance = 0.5;
};

struct McmcDiagnostics {
  double acceptance_rate = 0.0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  double step_scale = 0.0;
  std::vector<std::string> warnings;
};

struct PosteriorSample {
  /// N x ambient dimension.
  Eigen::MatrixXd draws;
  SamplerKind kind = SamplerKind::direct;
  std::uint64_t seed = 0;
  std::optional<McmcDiagnostics> diagnostics;
  double effective_size = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(draws.rows()); }
};

/// i.i.d. draws from a model's direct sampler, generated in fixed-size blocks
/// with per-block derived seeds. Output does not depend on `threads`.
PosteriorSample sample_posterior_direct(const PosteriorModel& model, std::size_t n,
                                        std::uint64_t seed, std::size_t threads = 1);

/// Adaptive random-walk Metropolis in free coordinates. The proposal
/// covariance and scale adapt during burn-in only, then stay fixed.
PosteriorSample sample_posterior_mcmc(const PosteriorModel& model, std::size_t n,
                                      std::uint64_t seed, const McmcTuning& tuning = {});

/// ESS = N / (1 + 2 sum rho_k), summing autocorrelation pairs until the first
/// negative pair sum.
double effective_sample_size(std::span<const double> series);

}  // namespace fbst
