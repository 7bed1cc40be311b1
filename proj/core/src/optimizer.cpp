#include "fbst/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fbst/errors.hpp"
#include "fbst/local_search.hpp"
#include "fbst/random.hpp"

namespace fbst {

std::string_view to_string(OptimumStatus status) {
  switch (status) {
    case OptimumStatus::converged: return "converged";
    case OptimumStatus::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

std::string_view to_string(ConstrainedRoute route) {
  switch (route) {
    case ConstrainedRoute::automatic: return "auto";
    case ConstrainedRoute::embedding: return "embedding";
    case ConstrainedRoute::penalty: return "penalty";
  }
  return "unknown";
}

ConstrainedRoute route_from_string(std::string_view name) {
  if (name == "auto") return ConstrainedRoute::automatic;
  if (name == "embedding") return ConstrainedRoute::embedding;
  if (name == "penalty") return ConstrainedRoute::penalty;
  throw ValidationError("unknown optimization route '" + std::string(name) + "'");
}

namespace {

constexpr std::size_t kProbesPerStart = 64;

// Center of the box first, then seeded Halton points, keeping those where the
// objective is finite.
std::vector<Eigen::VectorXd> feasible_starts(const search::Objective& f, const Box& box,
                                             const OptimizerOptions& options,
                                             std::size_t& evaluations) {
  std::vector<Eigen::VectorXd> starts;
  const std::size_t d = box.dimension();
  const std::size_t wanted = std::max<std::size_t>(1, options.starts);
  auto consider = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const double v = f(x);
    if (v > -kInf && !std::isnan(v)) starts.push_back(x);
  };
  consider(box.center());
  for (std::size_t i = 0; starts.size() < wanted && i < wanted * kProbesPerStart; ++i)
    consider(box.at(halton_point(i, d, options.seed)));
  return starts;
}

search::LocalResult local_maximize(const search::Objective& f, const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& step, std::size_t budget) {
  search::NelderMeadOptions nm;
  nm.max_evaluations = budget;
  search::LocalResult first = search::nelder_mead(f, start, step, nm);
  // A restart from the reported optimum guards against simplex collapse.
  nm.max_evaluations = std::max<std::size_t>(budget / 4, 200);
  search::LocalResult second = search::nelder_mead(f, first.x, 1e-3 * step, nm);
  search::LocalResult best = second.value >= first.value ? second : first;
  best.converged = first.converged && second.converged;
  best.evaluations = first.evaluations + second.evaluations;
  search::LocalResult polished = search::newton_polish(f, best.x, best.value);
  best.evaluations += polished.evaluations;
  if (polished.value >= best.value) {
    best.x = polished.x;
    best.value = polished.value;
  }
  return best;
}

OptimumReport multistart(const search::Objective& f, const Box& box,
                         const OptimizerOptions& options) {
  OptimumReport report;
  std::size_t evaluations = 0;
  const auto starts = feasible_starts(f, box, options, evaluations);
  report.evaluations = evaluations;
  if (starts.empty()) return report;
  const Eigen::VectorXd step = 0.1 * (box.upper - box.lower);
  bool have = false;
  search::LocalResult best;
  for (const auto& start : starts) {
    search::LocalResult r = local_maximize(f, start, step, options.max_evaluations);
    report.evaluations += r.evaluations;
    if (!have || r.value > best.value) {
      best = r;
      have = true;
    }
  }
  report.maximizer = best.x;
  report.log_value = best.value;
  report.status = best.converged ? OptimumStatus::converged : OptimumStatus::budget_exhausted;
  report.restarts = starts.size();
  return report;
}

OptimumReport embedding_route(const SurpriseFunction& sf, const Hypothesis& hypothesis,
                              const OptimizerOptions& options) {
  const Embedding& e = hypothesis.embedding();
  auto f = [&](const Eigen::VectorXd& u) {
    const Point theta = e.map(u);
    return sf.log_surprise_unchecked(theta);
  };
  OptimumReport report;
  if (e.dimension == 0) {
    report.maximizer = e.map(Eigen::VectorXd());
    report.log_value = sf.log_surprise(report.maximizer);
    report.evaluations = 1;
    report.restarts = 1;
  } else {
    report = multistart(f, e.domain, options);
    if (report.restarts == 0) {
      // The null set lies where the surprise vanishes: s* = 0.
      report.maximizer = e.map(e.domain.center());
      report.log_value = -kInf;
    } else {
      report.maximizer = e.map(report.maximizer);
    }
  }
  report.route = ConstrainedRoute::embedding;
  report.constraint_residual = hypothesis.evaluate(report.maximizer).residual;
  return report;
}

struct AugmentedLagrangian {
  const SurpriseFunction& sf;
  const Hypothesis& hypothesis;
  Eigen::VectorXd lambda;
  Eigen::VectorXd nu;
  double mu = 10.0;

  double operator()(const Eigen::VectorXd& x) const {
    const Point theta = sf.space().from_free(x);
    const double f = sf.log_surprise_unchecked(theta);
    if (!(f > -kInf)) return -kInf;
    const ConstraintValues c = hypothesis.evaluate(theta);
    double value = f;
    if (c.equalities.size() > 0)
      value -= lambda.dot(c.equalities) + 0.5 * mu * c.equalities.squaredNorm();
    for (Eigen::Index j = 0; j < c.inequalities.size(); ++j) {
      const double shifted = std::max(0.0, nu[j] + mu * c.inequalities[j]);
      value -= (shifted * shifted - nu[j] * nu[j]) / (2.0 * mu);
    }
    return value;
  }
};

OptimumReport penalty_route(const SurpriseFunction& sf, const Hypothesis& hypothesis,
                            const OptimizerOptions& options) {
  const ParameterSpace& space = sf.space();
  const Box& box = sf.posterior().search_box();
  auto f = [&](const Eigen::VectorXd& x) { return sf.log_surprise_unchecked(space.from_free(x)); };

  OptimumReport report;
  report.route = ConstrainedRoute::penalty;
  std::size_t evaluations = 0;
  const auto starts = feasible_starts(f, box, options, evaluations);
  report.evaluations = evaluations;

  const Point probe = space.from_free(box.center());
  const ConstraintValues shape = hypothesis.evaluate(probe);
  const Eigen::VectorXd width = box.upper - box.lower;

  bool have = false;
  bool best_converged = false;
  for (const auto& start : starts) {
    AugmentedLagrangian lagrangian{sf, hypothesis,
                                   Eigen::VectorXd::Zero(shape.equalities.size()),
                                   Eigen::VectorXd::Zero(shape.inequalities.size())};
    Eigen::VectorXd x = start;
    double previous_residual = kInf;
    bool converged = false;
    bool local_converged = true;
    for (int iter = 0; iter < 80; ++iter) {
      const Eigen::VectorXd step = (iter == 0 ? 0.1 : 0.01) * width;
      auto objective = [&](const Eigen::VectorXd& y) { return lagrangian(y); };
      search::LocalResult r = local_maximize(objective, x, step, options.max_evaluations);
      report.evaluations += r.evaluations;
      if (!(r.value > -kInf)) break;
      const double moved = (r.x - x).cwiseAbs().maxCoeff();
      x = r.x;
      local_converged = r.converged;
      const ConstraintValues c = hypothesis.evaluate(space.from_free(x));
      const double residual = c.residual;
      if (residual <= 1e-11 ||
          (residual <= 0.1 * kFeasibilityTolerance && moved <= 1e-10 * (1.0 + x.cwiseAbs().maxCoeff()))) {
        converged = true;
        break;
      }
      if (c.equalities.size() > 0) lagrangian.lambda += lagrangian.mu * c.equalities;
      for (Eigen::Index j = 0; j < c.inequalities.size(); ++j)
        lagrangian.nu[j] = std::max(0.0, lagrangian.nu[j] + lagrangian.mu * c.inequalities[j]);
      if (residual > 0.25 * previous_residual) lagrangian.mu = std::min(lagrangian.mu * 10.0, 1e12);
      previous_residual = residual;
    }
    const Point theta = space.from_free(x);
    const ConstraintValues c = hypothesis.evaluate(theta);
    if (!c.feasible) continue;
    const double value = sf.log_surprise_unchecked(theta);
    if (!have || value > report.log_value) {
      report.maximizer = theta;
      report.log_value = value;
      report.constraint_residual = c.residual;
      best_converged = converged && local_converged;
      have = true;
    }
  }
  if (!have) {
    throw OptimizationError("no feasible point found for hypothesis '" + hypothesis.name() +
                            "'; the null set may be empty");
  }
  report.restarts = starts.size();
  report.status = best_converged ? OptimumStatus::converged : OptimumStatus::budget_exhausted;
  return report;
}

}  // namespace

OptimumReport sup_surprise_global(const SurpriseFunction& sf, const OptimizerOptions& options) {
  const ParameterSpace& space = sf.space();
  auto f = [&](const Eigen::VectorXd& x) { return sf.log_surprise_unchecked(space.from_free(x)); };
  OptimumReport report = multistart(f, sf.posterior().search_box(), options);
  if (report.restarts == 0)
    throw OptimizationError("surprise function is zero everywhere in the search box");
  report.maximizer = space.from_free(report.maximizer);
  return report;
}

OptimumReport sup_surprise_hypothesis(const SurpriseFunction& sf, const Hypothesis& hypothesis,
                                      const OptimizerOptions& options, ConstrainedRoute route) {
  if (hypothesis.ambient_dimension() != sf.space().ambient_dimension())
    throw ValidationError("hypothesis and model live in spaces of different dimension");
  if (route == ConstrainedRoute::automatic)
    route = hypothesis.has_embedding() ? ConstrainedRoute::embedding : ConstrainedRoute::penalty;
  if (route == ConstrainedRoute::embedding) {
    if (!hypothesis.has_embedding())
      throw ValidationError("hypothesis '" + hypothesis.name() + "' has no embedding");
    return embedding_route(sf, hypothesis, options);
  }
  if (hypothesis.num_equalities() == 0 && !hypothesis.inequalities())
    return [&] {
      OptimumReport r = sup_surprise_global(sf, options);
      r.route = ConstrainedRoute::penalty;
      return r;
    }();
  return penalty_route(sf, hypothesis, options);
}

}  // namespace fbst
