#include "fbst/parameter_space.hpp"

#include <cmath>

#include "fbst/errors.hpp"

namespace fbst {

ParameterSpace::ParameterSpace(std::vector<std::string> labels, std::vector<Interval> bounds,
                               bool simplex)
    : labels_(std::move(labels)), bounds_(std::move(bounds)), simplex_(simplex) {
  if (labels_.empty()) throw ValidationError("parameter space needs at least one coordinate");
  if (labels_.size() != bounds_.size())
    throw ValidationError("parameter space: label count differs from bound count");
  if (simplex_ && labels_.size() < 2)
    throw ValidationError("simplex needs at least two categories");
  for (const auto& b : bounds_) {
    if (!(b.lower < b.upper)) throw ValidationError("parameter space: empty coordinate interval");
  }
}

ParameterSpace ParameterSpace::unit_interval(std::string label) {
  return ParameterSpace({std::move(label)}, {Interval{0.0, 1.0}});
}

ParameterSpace ParameterSpace::simplex(std::vector<std::string> labels) {
  std::vector<Interval> bounds(labels.size(), Interval{0.0, 1.0});
  return ParameterSpace(std::move(labels), std::move(bounds), true);
}

ParameterSpace ParameterSpace::simplex(std::size_t categories) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < categories; ++i) labels.push_back("p" + std::to_string(i + 1));
  return simplex(std::move(labels));
}

ParameterSpace ParameterSpace::positive_half_line(std::string label) {
  return ParameterSpace({std::move(label)}, {Interval{0.0, kInf}});
}

ParameterSpace ParameterSpace::real_line(std::string label) {
  return ParameterSpace({std::move(label)}, {Interval{-kInf, kInf}});
}

std::optional<std::size_t> ParameterSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

void ParameterSpace::check_dimension(const Point& theta) const {
  if (static_cast<std::size_t>(theta.size()) != labels_.size()) {
    throw ValidationError("point has dimension " + std::to_string(theta.size()) +
                          ", expected " + std::to_string(labels_.size()));
  }
}

bool ParameterSpace::contains(const Point& theta, double tol) const {
  if (static_cast<std::size_t>(theta.size()) != labels_.size()) return false;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double x = theta[static_cast<Eigen::Index>(i)];
    if (std::isnan(x) || !bounds_[i].contains(x, tol)) return false;
  }
  if (simplex_ && std::abs(theta.sum() - 1.0) > std::max(tol, 1e-12)) return false;
  return true;
}

Eigen::VectorXd ParameterSpace::to_free(const Point& theta) const {
  if (!simplex_) return theta;
  return theta.head(theta.size() - 1);
}

Point ParameterSpace::from_free(const Eigen::VectorXd& free) const {
  if (!simplex_) return free;
  Point theta(free.size() + 1);
  theta.head(free.size()) = free;
  theta[free.size()] = 1.0 - free.sum();
  return theta;
}

}  // namespace fbst
