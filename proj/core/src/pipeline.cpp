#include "fbst/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbst/errors.hpp"

namespace fbst {

std::string_view to_string(IntegrationRoute route) {
  switch (route) {
    case IntegrationRoute::automatic: return "auto";
    case IntegrationRoute::direct: return "direct";
    case IntegrationRoute::mcmc: return "mcmc";
    case IntegrationRoute::quadrature: return "quadrature";
  }
  return "unknown";
}

IntegrationRoute integration_route_from_string(std::string_view name) {
  if (name == "auto") return IntegrationRoute::automatic;
  if (name == "direct") return IntegrationRoute::direct;
  if (name == "mcmc") return IntegrationRoute::mcmc;
  if (name == "quadrature") return IntegrationRoute::quadrature;
  throw ValidationError("unknown sampling method '" + std::string(name) + "'");
}

Evaluation evaluate(const SurpriseFunction& sf, const Hypothesis& hypothesis,
                    const EvaluationSettings& settings) {
  if (!(hypothesis.ambient_dimension() == sf.space().ambient_dimension()))
    throw ValidationError("hypothesis and model live in different spaces");
  settings.thresholds.validate();

  Evaluation out;
  out.t = hypothesis.space_dimension();
  out.h = hypothesis.dimension();
  out.global = sup_surprise_global(sf, settings.optimizer);
  out.constrained = sup_surprise_hypothesis(sf, hypothesis, settings.optimizer, settings.route);
  out.log_s_hat = out.global.log_value;
  out.log_s_star = std::min(out.constrained.log_value, out.log_s_hat);
  out.mode_attained =
      std::isfinite(out.log_s_hat) &&
      out.log_s_hat - out.log_s_star <=
          kModeAttainmentTolerance * std::max(1.0, std::abs(out.log_s_hat));

  // T(s*) is all of Theta once the hypothesis attains s-hat.
  const double threshold = out.mode_attained ? kInf : out.log_s_star;
  const PosteriorModel& model = sf.posterior();

  IntegrationRoute route = settings.integration;
  if (route == IntegrationRoute::automatic)
    route = model.has_direct_sampler() ? IntegrationRoute::direct : IntegrationRoute::mcmc;
  out.integration = route;

  if (route == IntegrationRoute::quadrature) {
    out.estimate = quadrature_evalue(model, sf, threshold);
  } else {
    if (settings.draws == 0) throw ValidationError("number of draws must be positive");
    PosteriorSample sample =
        route == IntegrationRoute::direct
            ? sample_posterior_direct(model, settings.draws, settings.seed, settings.threads)
            : sample_posterior_mcmc(model, settings.draws, settings.seed, settings.tuning);
    TruthFunction w(sample, sf);
    out.effective_size = sample.effective_size;
    out.mcmc = sample.diagnostics;
    out.estimate = estimate_evalue(w, threshold, sample.effective_size);
    if (settings.keep_truth_function) out.truth = std::move(w);
  }

  if (hypothesis.is_sharp()) {
    out.sev = standardized_evalue(out.t, out.h, out.estimate.ev_bar);
    out.decision = decide(*out.sev, settings.thresholds);
  }
  return out;
}

}  // namespace fbst
