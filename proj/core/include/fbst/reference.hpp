#pragma once

#include <functional>
#include <string_view>

#include "fbst/model.hpp"

namespace fbst {

enum class ReferenceKind { uniform, jeffreys, custom };

std::string_view to_string(ReferenceKind kind);
ReferenceKind reference_kind_from_string(std::string_view name);

/// Unnormalized, possibly improper reference density r(theta), in log space.
class ReferenceDensity {
 public:
  using LogDensity = std::function<double(const Point&)>;

  /// r(theta) = 1.
  static ReferenceDensity uniform();
  /// r(theta) proportional to sqrt(det G(theta)) for a built-in family.
  /// Custom models are refused.
  static ReferenceDensity jeffreys(const PosteriorModel& model);
  static ReferenceDensity custom(LogDensity log_density);
  static ReferenceDensity of_kind(ReferenceKind kind, const PosteriorModel& model);

  ReferenceKind kind() const { return kind_; }
  double log_density(const Point& theta) const { return log_density_ ? log_density_(theta) : 0.0; }

 private:
  ReferenceDensity(ReferenceKind kind, LogDensity log_density)
      : kind_(kind), log_density_(std::move(log_density)) {}

  ReferenceKind kind_;
  LogDensity log_density_;
};

/// s(theta) = p_n(theta) / r(theta).
class SurpriseFunction {
 public:
  SurpriseFunction(PosteriorModel posterior, ReferenceDensity reference)
      : posterior_(std::move(posterior)), reference_(std::move(reference)) {}

  const PosteriorModel& posterior() const { return posterior_; }
  const ReferenceDensity& reference() const { return reference_; }
  const ParameterSpace& space() const { return posterior_.space(); }

  /// log p_n(theta) - log r(theta); -inf off the support. Checks dimension.
  double log_surprise(const Point& theta) const;
  double log_surprise_unchecked(const Point& theta) const;

 private:
  PosteriorModel posterior_;
  ReferenceDensity reference_;
};

inline double log_surprise(const SurpriseFunction& sf, const Point& theta) {
  return sf.log_surprise(theta);
}

}  // namespace fbst
