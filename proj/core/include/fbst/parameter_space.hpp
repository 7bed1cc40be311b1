#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace fbst {

using Point = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSupportTolerance = 1e-12;

struct Interval {
  double lower = -kInf;
  double upper = kInf;

  bool contains(double x, double tol = 0.0) const { return x >= lower - tol && x <= upper + tol; }
  bool bounded() const { return lower > -kInf && upper < kInf; }
  double width() const { return upper - lower; }

  bool operator==(const Interval&) const = default;
};

/// Axis-aligned box over the free coordinates of a space.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  std::size_t dimension() const { return static_cast<std::size_t>(lower.size()); }
  Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
  /// Point at unit-cube coordinates u.
  Eigen::VectorXd at(const Eigen::VectorXd& u) const {
    return lower + (upper - lower).cwiseProduct(u);
  }
};

/// Parameter space Theta. Points are stored in ambient coordinates. A simplex
/// space with K categories has K ambient coordinates and dimension K-1; its
/// free coordinates are the first K-1.
class ParameterSpace {
 public:
  ParameterSpace(std::vector<std::string> labels, std::vector<Interval> bounds,
                 bool simplex = false);

  static ParameterSpace unit_interval(std::string label = "theta");
  static ParameterSpace simplex(std::vector<std::string> labels);
  static ParameterSpace simplex(std::size_t categories);
  static ParameterSpace positive_half_line(std::string label);
  static ParameterSpace real_line(std::string label);

  std::size_t ambient_dimension() const { return labels_.size(); }
  /// t = dim(Theta).
  std::size_t dimension() const { return simplex_ ? labels_.size() - 1 : labels_.size(); }
  bool is_simplex() const { return simplex_; }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Interval>& bounds() const { return bounds_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  /// Support membership to `tol`.
  bool contains(const Point& theta, double tol = kSupportTolerance) const;
  /// Strict support membership, used by density evaluators.
  bool in_support(const Point& theta) const { return contains(theta, 0.0); }

  /// Throws ValidationError when theta has the wrong ambient dimension.
  void check_dimension(const Point& theta) const;

  Eigen::VectorXd to_free(const Point& theta) const;
  Point from_free(const Eigen::VectorXd& free) const;

  /// Bounds of free coordinate k, ignoring the simplex sum constraint.
  Interval free_bounds(std::size_t k) const { return bounds_[k]; }

  bool operator==(const ParameterSpace&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<Interval> bounds_;
  bool simplex_ = false;
};

}  // namespace fbst
