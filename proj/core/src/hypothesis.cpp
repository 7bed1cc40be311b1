#include "fbst/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fbst/errors.hpp"
#include "fbst/random.hpp"
#include "fbst/reparameterization.hpp"

namespace fbst {

namespace {

Eigen::VectorXd call_or_empty(const Hypothesis::VectorFunction& f, const Point& theta) {
  return f ? f(theta) : Eigen::VectorXd();
}

// Finite start range for free coordinate k.
Interval start_range(const ParameterSpace& space, std::size_t k, const std::optional<Box>& box) {
  const Interval b = space.free_bounds(k);
  if (b.bounded()) return b;
  if (!box) {
    throw ValidationError("coordinate '" + space.labels()[k] +
                          "' is unbounded; a search box is required to embed the hypothesis");
  }
  const auto i = static_cast<Eigen::Index>(k);
  return Interval{std::max(b.lower, box->lower[i]), std::min(b.upper, box->upper[i])};
}

}  // namespace

Hypothesis::Hypothesis(std::string name, const ParameterSpace& space, VectorFunction equalities,
                       std::size_t num_equalities, VectorFunction inequalities,
                       std::optional<Embedding> embedding)
    : name_(std::move(name)),
      ambient_(space.ambient_dimension()),
      space_dim_(space.dimension()),
      equalities_(std::move(equalities)),
      num_equalities_(num_equalities),
      inequalities_(std::move(inequalities)),
      embedding_(std::move(embedding)) {
  if (num_equalities_ > space_dim_)
    throw ValidationError("hypothesis declares more equalities than the space dimension");
  if (num_equalities_ > 0 && !equalities_)
    throw ValidationError("hypothesis declares equalities but provides no equality function");
  if (!embedding_) return;
  const Embedding& e = *embedding_;
  if (e.dimension != dimension())
    throw ValidationError("embedding dimension " + std::to_string(e.dimension) +
                          " differs from the declared hypothesis dimension " +
                          std::to_string(dimension()));
  if (!e.map) throw ValidationError("embedding needs a map");
  if (e.domain.dimension() != e.dimension || static_cast<std::size_t>(e.domain.upper.size()) != e.dimension)
    throw ValidationError("embedding domain has the wrong dimension");
  std::size_t landed = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    const Point theta = e.map(e.domain.at(halton_point(i, e.dimension, 0)));
    if (static_cast<std::size_t>(theta.size()) != ambient_)
      throw ValidationError("embedding returns points of the wrong dimension");
    if (!space.contains(theta)) continue;
    ++landed;
    if (evaluate(theta).residual > kFeasibilityTolerance)
      throw ValidationError("embedding of '" + name_ + "' leaves the null set");
  }
  if (landed == 0) throw ValidationError("embedding of '" + name_ + "' never lands in the support");
}

ConstraintValues Hypothesis::evaluate(const Point& theta) const {
  if (static_cast<std::size_t>(theta.size()) != ambient_)
    throw ValidationError("point has dimension " + std::to_string(theta.size()) + ", expected " +
                          std::to_string(ambient_));
  ConstraintValues out;
  out.equalities = call_or_empty(equalities_, theta);
  out.inequalities = call_or_empty(inequalities_, theta);
  double residual = 0.0;
  for (double h : out.equalities) residual = std::max(residual, std::isnan(h) ? kInf : std::abs(h));
  for (double g : out.inequalities) residual = std::max(residual, std::isnan(g) ? kInf : g);
  out.residual = residual;
  out.feasible = residual <= kFeasibilityTolerance;
  return out;
}

ConstraintValues evaluate_constraints(const Hypothesis& hypothesis, const Point& theta) {
  return hypothesis.evaluate(theta);
}

Hypothesis Hypothesis::point(const ParameterSpace& space,
                             const std::vector<std::pair<std::size_t, double>>& fixings,
                             const std::optional<Box>& search_box) {
  if (fixings.empty()) throw ValidationError("point hypothesis needs at least one fixing");
  std::set<std::size_t> seen;
  for (const auto& [index, value] : fixings) {
    if (index >= space.ambient_dimension())
      throw ValidationError("fixed coordinate index out of range");
    if (!seen.insert(index).second) throw ValidationError("coordinate fixed twice");
    if (!std::isfinite(value) || !space.bounds()[index].contains(value))
      throw ValidationError("fixed value for '" + space.labels()[index] + "' is off the support");
  }
  const std::size_t ambient = space.ambient_dimension();
  std::vector<bool> fixed(ambient, false);
  Point base = Point::Zero(static_cast<Eigen::Index>(ambient));
  double fixed_mass = 0.0;
  for (const auto& [index, value] : fixings) {
    fixed[index] = true;
    base[static_cast<Eigen::Index>(index)] = value;
    fixed_mass += value;
  }
  std::vector<std::size_t> free_coords;
  for (std::size_t i = 0; i < ambient; ++i)
    if (!fixed[i]) free_coords.push_back(i);

  std::string name = "point(";
  for (std::size_t k = 0; k < fixings.size(); ++k) {
    name += (k ? "," : "") + space.labels()[fixings[k].first] + "=" +
            std::to_string(fixings[k].second);
  }
  name += ")";

  auto equalities = [fixings](const Point& theta) {
    Eigen::VectorXd h(static_cast<Eigen::Index>(fixings.size()));
    for (std::size_t k = 0; k < fixings.size(); ++k)
      h[static_cast<Eigen::Index>(k)] =
          theta[static_cast<Eigen::Index>(fixings[k].first)] - fixings[k].second;
    return h;
  };

  Embedding embedding;
  std::size_t m = fixings.size();
  if (!space.is_simplex()) {
    embedding.dimension = free_coords.size();
    embedding.domain.lower.resize(static_cast<Eigen::Index>(free_coords.size()));
    embedding.domain.upper.resize(static_cast<Eigen::Index>(free_coords.size()));
    for (std::size_t k = 0; k < free_coords.size(); ++k) {
      const Interval r = start_range(space, free_coords[k], search_box);
      embedding.domain.lower[static_cast<Eigen::Index>(k)] = r.lower;
      embedding.domain.upper[static_cast<Eigen::Index>(k)] = r.upper;
    }
    embedding.map = [base, free_coords](const Eigen::VectorXd& u) {
      Point theta = base;
      for (std::size_t k = 0; k < free_coords.size(); ++k)
        theta[static_cast<Eigen::Index>(free_coords[k])] = u[static_cast<Eigen::Index>(k)];
      return theta;
    };
  } else {
    const double rest = 1.0 - fixed_mass;
    if (free_coords.empty()) {
      if (std::abs(rest) > 1e-12) throw ValidationError("simplex fixings must sum to one");
      m = space.dimension();
    } else if (rest < -1e-12) {
      throw ValidationError("simplex fixings exceed total mass one");
    }
    const std::size_t dim = free_coords.empty() ? 0 : free_coords.size() - 1;
    embedding.dimension = dim;
    embedding.domain.lower = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    embedding.domain.upper = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim),
                                                       std::max(rest, 0.0));
    embedding.map = [base, free_coords, rest](const Eigen::VectorXd& u) {
      Point theta = base;
      if (free_coords.empty()) return theta;
      double used = 0.0;
      for (std::size_t k = 0; k + 1 < free_coords.size(); ++k) {
        theta[static_cast<Eigen::Index>(free_coords[k])] = u[static_cast<Eigen::Index>(k)];
        used += u[static_cast<Eigen::Index>(k)];
      }
      theta[static_cast<Eigen::Index>(free_coords.back())] = rest - used;
      return theta;
    };
  }
  return Hypothesis(std::move(name), space, std::move(equalities), m, {}, std::move(embedding));
}

Hypothesis Hypothesis::hardy_weinberg(const ParameterSpace& space) {
  if (!space.is_simplex() || space.ambient_dimension() != 3)
    throw ValidationError("hardy_weinberg needs a three-category simplex");
  auto equalities = [](const Point& theta) {
    const double root = 1.0 - std::sqrt(std::max(theta[2], 0.0));
    return Eigen::VectorXd::Constant(1, theta[0] - root * root);
  };
  Embedding embedding;
  embedding.dimension = 1;
  embedding.domain.lower = Eigen::VectorXd::Zero(1);
  embedding.domain.upper = Eigen::VectorXd::Ones(1);
  embedding.map = [](const Eigen::VectorXd& u) {
    const double p = u[0];
    Point theta(3);
    theta << p * p, 2.0 * p * (1.0 - p), (1.0 - p) * (1.0 - p);
    if (!(p >= 0.0 && p <= 1.0)) theta[1] = -1.0;  // off the support
    return theta;
  };
  return Hypothesis("hardy_weinberg", space, std::move(equalities), 1, {}, std::move(embedding));
}

Hypothesis Hypothesis::equal_coordinates(const ParameterSpace& space,
                                         const std::vector<std::size_t>& coordinates) {
  if (!space.is_simplex())
    throw ValidationError("equal_means compares category probabilities and needs a simplex");
  const std::set<std::size_t> unique(coordinates.begin(), coordinates.end());
  if (unique.size() < 2 || unique.size() != coordinates.size())
    throw ValidationError("equal_means needs at least two distinct coordinates");
  if (*unique.rbegin() >= space.ambient_dimension())
    throw ValidationError("equal_means coordinate out of range");
  const std::size_t ambient = space.ambient_dimension();
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < ambient; ++i)
    if (!unique.count(i)) others.push_back(i);
  const auto c = static_cast<double>(coordinates.size());

  auto equalities = [coordinates](const Point& theta) {
    Eigen::VectorXd h(static_cast<Eigen::Index>(coordinates.size() - 1));
    for (std::size_t k = 1; k < coordinates.size(); ++k)
      h[static_cast<Eigen::Index>(k - 1)] = theta[static_cast<Eigen::Index>(coordinates[0])] -
                                            theta[static_cast<Eigen::Index>(coordinates[k])];
    return h;
  };

  Embedding embedding;
  embedding.dimension = others.size();
  embedding.domain.lower = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(others.size()));
  embedding.domain.upper = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(others.size()));
  if (!others.empty()) embedding.domain.upper[0] = 1.0 / c;
  embedding.map = [coordinates, others, ambient, c](const Eigen::VectorXd& u) {
    Point theta(static_cast<Eigen::Index>(ambient));
    const double v = others.empty() ? 1.0 / c : u[0];
    for (auto i : coordinates) theta[static_cast<Eigen::Index>(i)] = v;
    if (others.empty()) return theta;
    double used = c * v;
    for (std::size_t k = 0; k + 1 < others.size(); ++k) {
      theta[static_cast<Eigen::Index>(others[k])] = u[static_cast<Eigen::Index>(k + 1)];
      used += u[static_cast<Eigen::Index>(k + 1)];
    }
    theta[static_cast<Eigen::Index>(others.back())] = 1.0 - used;
    return theta;
  };
  std::string name = "equal_means(";
  for (std::size_t k = 0; k < coordinates.size(); ++k)
    name += (k ? "," : "") + space.labels()[coordinates[k]];
  name += ")";
  return Hypothesis(std::move(name), space, std::move(equalities), coordinates.size() - 1, {},
                    std::move(embedding));
}

Hypothesis Hypothesis::whole_space(const ParameterSpace& space, const std::optional<Box>& search_box) {
  Embedding embedding;
  const std::size_t t = space.dimension();
  embedding.dimension = t;
  embedding.domain.lower.resize(static_cast<Eigen::Index>(t));
  embedding.domain.upper.resize(static_cast<Eigen::Index>(t));
  for (std::size_t k = 0; k < t; ++k) {
    const Interval r = start_range(space, k, search_box);
    embedding.domain.lower[static_cast<Eigen::Index>(k)] = r.lower;
    embedding.domain.upper[static_cast<Eigen::Index>(k)] = r.upper;
  }
  embedding.map = [space](const Eigen::VectorXd& u) { return space.from_free(u); };
  return Hypothesis("whole_space", space, {}, 0, {}, std::move(embedding));
}

Hypothesis Hypothesis::intersection(const Hypothesis& first, const Hypothesis& second) {
  if (first.ambient_ != second.ambient_ || first.space_dim_ != second.space_dim_)
    throw ValidationError("cannot intersect hypotheses on different spaces");
  auto concat = [](const VectorFunction& a, const VectorFunction& b) -> VectorFunction {
    if (!a && !b) return {};
    return [a, b](const Point& theta) {
      const Eigen::VectorXd x = call_or_empty(a, theta);
      const Eigen::VectorXd y = call_or_empty(b, theta);
      Eigen::VectorXd out(x.size() + y.size());
      out << x, y;
      return out;
    };
  };
  Hypothesis out = first;
  out.name_ = first.name_ + " & " + second.name_;
  out.equalities_ = concat(first.equalities_, second.equalities_);
  out.inequalities_ = concat(first.inequalities_, second.inequalities_);
  out.num_equalities_ = std::min(first.space_dim_, first.num_equalities_ + second.num_equalities_);
  out.embedding_.reset();
  return out;
}

Hypothesis Hypothesis::pushforward(const Reparameterization& map) const {
  if (map.source().ambient_dimension() != ambient_)
    throw ValidationError("reparameterization does not match the hypothesis space");
  auto pull = [map](const VectorFunction& f) -> VectorFunction {
    if (!f) return {};
    return [f, map](const Point& omega) { return f(map.inverse(omega)); };
  };
  std::optional<Embedding> embedding;
  if (embedding_) {
    Embedding e = *embedding_;
    e.map = [inner = embedding_->map, map](const Eigen::VectorXd& u) {
      return map.forward(inner(u));
    };
    embedding = std::move(e);
  }
  return Hypothesis(name_, map.image(), pull(equalities_), num_equalities_, pull(inequalities_),
                    std::move(embedding));
}

}  // namespace fbst
