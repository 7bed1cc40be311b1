#include "fbst/reference.hpp"

#include <cmath>

#include "fbst/errors.hpp"

namespace fbst {

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::uniform: return "uniform";
    case ReferenceKind::jeffreys: return "jeffreys";
    case ReferenceKind::custom: return "custom";
  }
  return "unknown";
}

ReferenceKind reference_kind_from_string(std::string_view name) {
  if (name == "uniform") return ReferenceKind::uniform;
  if (name == "jeffreys") return ReferenceKind::jeffreys;
  throw ValidationError("unknown reference '" + std::string(name) +
                        "' (expected uniform or jeffreys)");
}

ReferenceDensity ReferenceDensity::uniform() { return ReferenceDensity(ReferenceKind::uniform, {}); }

ReferenceDensity ReferenceDensity::custom(LogDensity log_density) {
  if (!log_density) throw ValidationError("custom reference needs a log-density");
  return ReferenceDensity(ReferenceKind::custom, std::move(log_density));
}

ReferenceDensity ReferenceDensity::jeffreys(const PosteriorModel& model) {
  // 0.5 log det G(theta), dropping additive constants.
  switch (model.family()) {
    case Family::beta_binomial:
      return ReferenceDensity(ReferenceKind::jeffreys, [](const Point& theta) {
        return -0.5 * std::log(theta[0]) - 0.5 * std::log1p(-theta[0]);
      });
    case Family::dirichlet_multinomial:
      return ReferenceDensity(ReferenceKind::jeffreys, [](const Point& theta) {
        return -0.5 * theta.array().log().sum();
      });
    case Family::normal_known_variance:
      return ReferenceDensity(ReferenceKind::jeffreys, [](const Point&) { return 0.0; });
    case Family::normal_mean_variance:
      return ReferenceDensity(ReferenceKind::jeffreys,
                              [](const Point& theta) { return -1.5 * std::log(theta[1]); });
    case Family::gamma_poisson:
      return ReferenceDensity(ReferenceKind::jeffreys,
                              [](const Point& theta) { return -0.5 * std::log(theta[0]); });
    case Family::custom: break;
  }
  throw ValidationError("Jeffreys reference is only available for built-in families");
}

ReferenceDensity ReferenceDensity::of_kind(ReferenceKind kind, const PosteriorModel& model) {
  switch (kind) {
    case ReferenceKind::uniform: return uniform();
    case ReferenceKind::jeffreys: return jeffreys(model);
    case ReferenceKind::custom: break;
  }
  throw ValidationError("custom references must be constructed with a log-density");
}

double SurpriseFunction::log_surprise(const Point& theta) const {
  posterior_.space().check_dimension(theta);
  return log_surprise_unchecked(theta);
}

double SurpriseFunction::log_surprise_unchecked(const Point& theta) const {
  if (!posterior_.space().in_support(theta)) return -kInf;
  const double lp = posterior_.log_potential_unchecked(theta);
  if (!(lp > -kInf)) return -kInf;
  const double value = lp - reference_.log_density(theta);
  return std::isnan(value) ? -kInf : value;
}

}  // namespace fbst
