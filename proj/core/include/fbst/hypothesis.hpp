#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fbst/parameter_space.hpp"

namespace fbst {

class Reparameterization;

inline constexpr double kFeasibilityTolerance = 1e-8;

struct ConstraintValues {
  Eigen::VectorXd equalities;
  Eigen::VectorXd inequalities;
  /// max(|h_i|, g_j^+), 0 when there are no constraints.
  double residual = 0.0;
  bool feasible = true;
};

/// Parameterization u -> theta of the null set, u in R^h. `domain` is a
/// finite box that seeds optimizer starts; points outside it are allowed and
/// map off the support when they leave the null set's domain.
struct Embedding {
  std::size_t dimension = 0;
  std::function<Point(const Eigen::VectorXd&)> map;
  Box domain;
};

/// Null set Theta_H = { theta : g(theta) <= 0, h(theta) = 0 }.
class Hypothesis {
 public:
  using VectorFunction = std::function<Eigen::VectorXd(const Point&)>;

  /// `num_equalities` is the declared number m of independent equalities, so
  /// that dim(H) = t - m. When an embedding is given its dimension must equal
  /// t - m and it must land on the null set.
  Hypothesis(std::string name, const ParameterSpace& space, VectorFunction equalities,
             std::size_t num_equalities, VectorFunction inequalities = {},
             std::optional<Embedding> embedding = std::nullopt);

  /// Coordinate fixings theta_j = v_j. On a simplex, fixing every category
  /// requires the values to sum to one. `search_box` (free coordinates)
  /// bounds embedding starts on unbounded coordinates.
  static Hypothesis point(const ParameterSpace& space,
                          const std::vector<std::pair<std::size_t, double>>& fixings,
                          const std::optional<Box>& search_box = std::nullopt);
  /// theta_1 = (1 - sqrt(theta_3))^2 on the three-category simplex, embedded
  /// by p -> (p^2, 2p(1-p), (1-p)^2).
  static Hypothesis hardy_weinberg(const ParameterSpace& space);
  /// theta_i equal for every i in `coordinates` (at least two). Simplex only.
  static Hypothesis equal_coordinates(const ParameterSpace& space,
                                      const std::vector<std::size_t>& coordinates);
  /// H = Theta; no constraints.
  static Hypothesis whole_space(const ParameterSpace& space,
                                const std::optional<Box>& search_box = std::nullopt);
  /// H1 and H2. Declared equalities add up; no embedding.
  static Hypothesis intersection(const Hypothesis& first, const Hypothesis& second);

  const std::string& name() const { return name_; }
  std::size_t ambient_dimension() const { return ambient_; }
  /// t.
  std::size_t space_dimension() const { return space_dim_; }
  /// h = dim(H) = t - m.
  std::size_t dimension() const { return space_dim_ - num_equalities_; }
  std::size_t num_equalities() const { return num_equalities_; }
  bool is_sharp() const { return num_equalities_ >= 1; }

  bool has_embedding() const { return embedding_.has_value(); }
  const Embedding& embedding() const { return *embedding_; }

  ConstraintValues evaluate(const Point& theta) const;

  const VectorFunction& equalities() const { return equalities_; }
  const VectorFunction& inequalities() const { return inequalities_; }

  /// Hypothesis in omega coordinates: h(phi^-1(omega)), g(phi^-1(omega)),
  /// embedding phi(e(u)).
  Hypothesis pushforward(const Reparameterization& map) const;

 private:
  std::string name_;
  std::size_t ambient_ = 0;
  std::size_t space_dim_ = 0;
  VectorFunction equalities_;
  std::size_t num_equalities_ = 0;
  VectorFunction inequalities_;
  std::optional<Embedding> embedding_;
};

ConstraintValues evaluate_constraints(const Hypothesis& hypothesis, const Point& theta);

}  // namespace fbst
