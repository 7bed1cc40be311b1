#include "fbst/reparameterization.hpp"

#include <algorithm>
#include <cmath>

#include "fbst/errors.hpp"
#include "fbst/random.hpp"

namespace fbst {

namespace {

// log(1 / (1 + e^-x)), stable for large |x|.
double log_sigmoid(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool is_positive_half_line(const Interval& b) { return b.lower == 0.0 && b.upper == kInf; }
bool is_unit_interval(const Interval& b) { return b.lower == 0.0 && b.upper == 1.0; }

std::vector<bool> select(const ParameterSpace& space, bool (*pred)(const Interval&)) {
  std::vector<bool> mask;
  for (const auto& b : space.bounds()) mask.push_back(pred(b));
  return mask;
}

ParameterSpace replace_bounds(const ParameterSpace& space, const std::vector<bool>& mask,
                              const std::string& prefix, Interval image) {
  std::vector<std::string> labels = space.labels();
  std::vector<Interval> bounds = space.bounds();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    labels[i] = prefix + "(" + labels[i] + ")";
    bounds[i] = image;
  }
  return ParameterSpace(std::move(labels), std::move(bounds));
}

}  // namespace

Reparameterization::Reparameterization(std::string name, ParameterSpace source,
                                       ParameterSpace image, Map forward, Map inverse,
                                       LogJacobian log_abs_det_inverse_jacobian)
    : name_(std::move(name)),
      source_(std::move(source)),
      image_(std::move(image)),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      log_jacobian_(std::move(log_abs_det_inverse_jacobian)) {
  if (!forward_ || !inverse_ || !log_jacobian_)
    throw ValidationError("reparameterization needs forward, inverse and Jacobian evaluators");
  if (source_.dimension() != image_.dimension())
    throw ValidationError("reparameterization must preserve the dimension");
}

Reparameterization Reparameterization::identity(const ParameterSpace& space) {
  auto id = [](const Point& x) { return x; };
  return Reparameterization("identity", space, space, id, id, [](const Point&) { return 0.0; });
}

Reparameterization Reparameterization::affine(const ParameterSpace& space, double scale,
                                              double shift) {
  if (space.is_simplex()) throw ValidationError("affine map does not apply to a simplex");
  if (!std::isfinite(scale) || scale == 0.0 || !std::isfinite(shift))
    throw ValidationError("affine map needs a finite non-zero scale");
  std::vector<Interval> bounds;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < space.ambient_dimension(); ++i) {
    const auto& b = space.bounds()[i];
    double lo = scale * b.lower + shift;
    double hi = scale * b.upper + shift;
    if (lo > hi) std::swap(lo, hi);
    bounds.push_back(Interval{lo, hi});
    labels.push_back("affine(" + space.labels()[i] + ")");
  }
  const double log_jac = -static_cast<double>(space.dimension()) * std::log(std::abs(scale));
  return Reparameterization(
      "affine", space, ParameterSpace(std::move(labels), std::move(bounds)),
      [scale, shift](const Point& x) -> Point { return (scale * x.array() + shift).matrix(); },
      [scale, shift](const Point& w) -> Point { return ((w.array() - shift) / scale).matrix(); },
      [log_jac](const Point&) { return log_jac; });
}

Reparameterization Reparameterization::log(const ParameterSpace& space) {
  const auto mask = space.is_simplex() ? std::vector<bool>{} : select(space, is_positive_half_line);
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
    throw ValidationError("log map needs a coordinate supported on (0, inf)");
  return Reparameterization(
      "log", space, replace_bounds(space, mask, "log", Interval{-kInf, kInf}),
      [mask](const Point& x) {
        Point w = x;
        for (std::size_t i = 0; i < mask.size(); ++i)
          if (mask[i]) w[static_cast<Eigen::Index>(i)] = std::log(x[static_cast<Eigen::Index>(i)]);
        return w;
      },
      [mask](const Point& w) {
        Point x = w;
        for (std::size_t i = 0; i < mask.size(); ++i)
          if (mask[i]) x[static_cast<Eigen::Index>(i)] = std::exp(w[static_cast<Eigen::Index>(i)]);
        return x;
      },
      [mask](const Point& w) {
        double s = 0.0;
        for (std::size_t i = 0; i < mask.size(); ++i)
          if (mask[i]) s += w[static_cast<Eigen::Index>(i)];
        return s;
      });
}

Reparameterization Reparameterization::log_odds(const ParameterSpace& space) {
  const auto mask = space.is_simplex() ? std::vector<bool>{} : select(space, is_unit_interval);
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
    throw ValidationError("log-odds map needs a coordinate supported on [0, 1]");
  return Reparameterization(
      "log_odds", space, replace_bounds(space, mask, "logit", Interval{-kInf, kInf}),
      [mask](const Point& x) {
        Point w = x;
        for (std::size_t i = 0; i < mask.size(); ++i) {
          if (!mask[i]) continue;
          const double p = x[static_cast<Eigen::Index>(i)];
          w[static_cast<Eigen::Index>(i)] = std::log(p) - std::log1p(-p);
        }
        return w;
      },
      [mask](const Point& w) {
        Point x = w;
        for (std::size_t i = 0; i < mask.size(); ++i)
          if (mask[i]) x[static_cast<Eigen::Index>(i)] = sigmoid(w[static_cast<Eigen::Index>(i)]);
        return x;
      },
      [mask](const Point& w) {
        double s = 0.0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
          if (!mask[i]) continue;
          const double v = w[static_cast<Eigen::Index>(i)];
          s += log_sigmoid(v) + log_sigmoid(-v);
        }
        return s;
      });
}

Reparameterization Reparameterization::stick_breaking(const ParameterSpace& space) {
  if (!space.is_simplex()) throw ValidationError("stick-breaking map needs a simplex");
  const std::size_t t = space.dimension();
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < t; ++k) labels.push_back("stick" + std::to_string(k + 1));
  ParameterSpace image(std::move(labels), std::vector<Interval>(t, Interval{-kInf, kInf}));
  const auto n = static_cast<Eigen::Index>(t);
  return Reparameterization(
      "stick_breaking", space, std::move(image),
      [n](const Point& x) {
        Point w(n);
        double rest = 1.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double v = x[k] / rest;
          w[k] = std::log(v) - std::log1p(-v);
          rest -= x[k];
        }
        return w;
      },
      [n](const Point& w) {
        Point x(n + 1);
        double rest = 1.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          x[k] = sigmoid(w[k]) * rest;
          rest *= sigmoid(-w[k]);
        }
        x[n] = rest;
        return x;
      },
      [n](const Point& w) {
        // Lower-triangular Jacobian: d theta_k / d omega_k = v_k (1 - v_k) rest_k.
        double s = 0.0;
        double log_rest = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          s += log_sigmoid(w[k]) + log_sigmoid(-w[k]) + log_rest;
          log_rest += log_sigmoid(-w[k]);
        }
        return s;
      });
}

Reparameterization Reparameterization::by_name(std::string_view name, const ParameterSpace& space) {
  if (name == "identity") return identity(space);
  if (name == "affine") return affine(space);
  if (name == "log") return log(space);
  if (name == "log_odds") return log_odds(space);
  if (name == "stick_breaking") return stick_breaking(space);
  throw ValidationError("unknown reparameterization '" + std::string(name) + "'");
}

double Reparameterization::round_trip_error(const Box& box, std::size_t points) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const Point theta = source_.from_free(box.at(halton_point(i, box.dimension(), 0)));
    if (!source_.in_support(theta)) continue;
    const Point back = inverse(forward(theta));
    if (back.size() != theta.size()) return kInf;
    const double err = (back - theta).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::isnan(err) ? kInf : err);
  }
  return worst;
}

namespace {

Box image_box(const PosteriorModel& model, const Reparameterization& map) {
  const Box& box = model.search_box();
  if (map.name() == "identity") return box;
  const std::size_t d = box.dimension();
  const Eigen::VectorXd margin = 1e-6 * (box.upper - box.lower);
  const Box inner{box.lower + margin, box.upper - margin};
  Box out{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), kInf),
          Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), -kInf)};
  for (std::size_t i = 0; i < 256; ++i) {
    const Point theta = model.space().from_free(inner.at(halton_point(i, d, 0)));
    if (!model.space().in_support(theta)) continue;
    const Eigen::VectorXd w = map.image().to_free(map.forward(theta));
    if (!w.allFinite()) continue;
    out.lower = out.lower.cwiseMin(w);
    out.upper = out.upper.cwiseMax(w);
  }
  if (!out.lower.allFinite() || !out.upper.allFinite() ||
      !(out.lower.array() < out.upper.array()).all())
    throw ValidationError("reparameterization '" + map.name() +
                          "' does not map the model's search box to a usable region");
  return out;
}

void check_applicable(const ParameterSpace& space, const Reparameterization& map) {
  if (!(space == map.source()))
    throw ValidationError("reparameterization '" + map.name() +
                          "' was built for a different parameter space");
}

}  // namespace

PosteriorModel pushforward(const PosteriorModel& model, const Reparameterization& map) {
  check_applicable(model.space(), map);
  if (map.round_trip_error(model.search_box()) > 1e-8)
    throw ValidationError("reparameterization '" + map.name() + "' failed the round-trip check");
  const ParameterSpace source = model.space();
  auto log_density = [model, map, source](const Point& omega) {
    const Point theta = map.inverse(omega);
    if (!source.in_support(theta)) return -kInf;
    const double lp = model.log_potential_unchecked(theta);
    if (!(lp > -kInf)) return -kInf;
    return lp + map.log_abs_det_jacobian(omega);
  };
  std::optional<PosteriorModel::Sampler> sampler;
  if (model.has_direct_sampler()) {
    sampler = [model, map](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
      Eigen::VectorXd theta(static_cast<Eigen::Index>(model.space().ambient_dimension()));
      model.sampler()(rng, theta);
      out = map.forward(theta);
    };
  }
  return PosteriorModel::custom(map.image(), std::move(log_density), image_box(model, map),
                                std::move(sampler));
}

SurpriseFunction pushforward(const SurpriseFunction& sf, const Reparameterization& map) {
  PosteriorModel posterior = pushforward(sf.posterior(), map);
  const ReferenceDensity reference = sf.reference();
  const ParameterSpace source = sf.space();
  auto log_reference = [reference, map, source](const Point& omega) {
    const Point theta = map.inverse(omega);
    return reference.log_density(theta) + map.log_abs_det_jacobian(omega);
  };
  return SurpriseFunction(std::move(posterior), ReferenceDensity::custom(std::move(log_reference)));
}

}  // namespace fbst
