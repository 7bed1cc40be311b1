#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "fbst/parameter_space.hpp"
#include "fbst/reference.hpp"

namespace fbst {

/// Bijection omega = phi(theta) between a source space and its image.
/// The Jacobian is taken over free coordinates.
class Reparameterization {
 public:
  using Map = std::function<Point(const Point&)>;
  using LogJacobian = std::function<double(const Point&)>;

  Reparameterization(std::string name, ParameterSpace source, ParameterSpace image, Map forward,
                     Map inverse, LogJacobian log_abs_det_inverse_jacobian);

  static Reparameterization identity(const ParameterSpace& space);
  /// omega = scale * theta + shift on every coordinate. Not defined on simplices.
  static Reparameterization affine(const ParameterSpace& space, double scale = 2.0,
                                   double shift = -1.0);
  /// omega = log theta on coordinates supported on (0, inf).
  static Reparameterization log(const ParameterSpace& space);
  /// omega = log(theta / (1 - theta)) on coordinates supported on [0, 1].
  static Reparameterization log_odds(const ParameterSpace& space);
  /// Simplex of K categories onto R^(K-1) through logits of stick fractions.
  static Reparameterization stick_breaking(const ParameterSpace& space);

  /// Looks up one of the built-in maps by name; throws ValidationError when
  /// the name is unknown or the map does not apply to `space`.
  static Reparameterization by_name(std::string_view name, const ParameterSpace& space);

  const std::string& name() const { return name_; }
  const ParameterSpace& source() const { return source_; }
  const ParameterSpace& image() const { return image_; }

  Point forward(const Point& theta) const { return forward_(theta); }
  Point inverse(const Point& omega) const { return inverse_(omega); }
  /// log |det d theta / d omega| at omega.
  double log_abs_det_jacobian(const Point& omega) const { return log_jacobian_(omega); }

  /// Max round-trip error |phi^-1(phi(theta)) - theta| over Halton points of
  /// `box` that lie in the source support.
  double round_trip_error(const Box& box, std::size_t points = 64) const;

 private:
  std::string name_;
  ParameterSpace source_;
  ParameterSpace image_;
  Map forward_;
  Map inverse_;
  LogJacobian log_jacobian_;
};

/// Model expressed in omega coordinates: p~(omega) = p(phi^-1(omega)) |J(omega)|.
/// A direct sampler, when present, is composed with phi.
PosteriorModel pushforward(const PosteriorModel& model, const Reparameterization& map);

/// s~(omega) = p~(omega) / r~(omega); the Jacobians cancel so that
/// s~(phi(theta)) = s(theta).
SurpriseFunction pushforward(const SurpriseFunction& sf, const Reparameterization& map);

}  // namespace fbst
