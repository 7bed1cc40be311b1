#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>

namespace fbst::search {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct LocalResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  std::size_t max_evaluations = 10000;
  double value_tolerance = 1e-13;
  double point_tolerance = 1e-10;
};

/// Derivative-free maximization. Non-finite values are treated as -inf, so an
/// objective may encode its domain by returning -inf outside it.
LocalResult nelder_mead(const Objective& f, const Eigen::VectorXd& start,
                        const Eigen::VectorXd& step, const NelderMeadOptions& options = {});

/// Newton refinement with central finite-difference derivatives. Accepts only
/// steps that do not decrease f; returns the input when the local Hessian is
/// not negative definite.
LocalResult newton_polish(const Objective& f, const Eigen::VectorXd& x, double value,
                          std::size_t max_iterations = 20);

/// Maximizes a scalar function on [lo, hi] (either end may be infinite),
/// starting from x0 with initial bracketing step `step`.
LocalResult maximize_1d(const std::function<double(double)>& f, double lo, double hi, double x0,
                        double step);

}  // namespace fbst::search
