#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "fbst/parameter_space.hpp"
#include "fbst/random.hpp"

namespace fbst {

enum class Family {
  beta_binomial,
  dirichlet_multinomial,
  normal_known_variance,
  normal_mean_variance,
  gamma_poisson,
  custom,
};

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

// Sufficient statistics. Raw observations are reduced on ingestion.

struct BinomialStats {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  bool operator==(const BinomialStats&) const = default;
};

struct MultinomialStats {
  std::vector<std::int64_t> counts;
  bool operator==(const MultinomialStats&) const = default;
};

struct NormalStats {
  std::int64_t n = 0;
  double sum = 0.0;
  double sum_squares = 0.0;
  bool operator==(const NormalStats&) const = default;
};

struct PoissonStats {
  std::int64_t total = 0;
  double exposure = 0.0;
  bool operator==(const PoissonStats&) const = default;
};

struct DataSet {
  Family family = Family::beta_binomial;
  std::variant<BinomialStats, MultinomialStats, NormalStats, PoissonStats> stats;

  static DataSet binomial(std::int64_t successes, std::int64_t trials);
  static DataSet multinomial(std::vector<std::int64_t> counts);
  static DataSet normal(Family family, std::int64_t n, double sum, double sum_squares);
  static DataSet poisson(std::int64_t total, double exposure);

  /// Reduces raw observations: 0/1 outcomes (binomial), category indices
  /// 0..K-1 (multinomial, `categories` = K), real values (normal), counts
  /// with unit exposure each (Poisson). The reduction does not depend on the
  /// order of the observations.
  static DataSet from_observations(Family family, std::span<const double> observations,
                                   std::size_t categories = 0);

  /// Number of observations n.
  std::int64_t size() const;

  bool operator==(const DataSet&) const = default;
};

// Conjugate hyperparameters. The same types describe priors and posteriors.

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
  bool operator==(const BetaParams&) const = default;
};

struct DirichletParams {
  std::vector<double> alpha;
  bool operator==(const DirichletParams&) const = default;
};

/// Normal mean with known observation variance.
struct NormalParams {
  double mean = 0.0;
  double variance = 1.0;
  double known_variance = 1.0;
  bool operator==(const NormalParams&) const = default;
};

/// Normal-inverse-gamma over (mu, sigma2):
/// mu | sigma2 ~ N(mean, sigma2 / kappa), sigma2 ~ InvGamma(shape, scale).
struct NormalInverseGammaParams {
  double mean = 0.0;
  double kappa = 1.0;
  double shape = 1.0;
  double scale = 1.0;
  bool operator==(const NormalInverseGammaParams&) const = default;
};

/// Gamma(shape, rate) over a Poisson rate.
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
  bool operator==(const GammaParams&) const = default;
};

using Hyperparameters =
    std::variant<BetaParams, DirichletParams, NormalParams, NormalInverseGammaParams, GammaParams>;

Family family_of(const Hyperparameters& params);

/// Throws ValidationError on non-positive shape parameters and similar.
void validate(const Hyperparameters& params);

/// Parameter space of a built-in family. `categories` is used by the
/// Dirichlet-multinomial family only.
ParameterSpace family_space(Family family, std::size_t categories = 0);

/// Immutable posterior: a log-potential over a parameter space plus optional
/// conjugate hyperparameters and an optional direct sampler. Copies share the
/// underlying state.
class PosteriorModel {
 public:
  using LogDensity = std::function<double(const Point&)>;
  /// Writes one ambient-coordinate draw into `out`.
  using Sampler = std::function<void(Rng&, Eigen::Ref<Eigen::VectorXd> out)>;

  /// Closed-form model with the given (posterior) hyperparameters.
  static PosteriorModel from_hyperparameters(Hyperparameters params);

  /// User model. The log-potential may be unnormalized; the search box spans
  /// the free coordinates and seeds optimizer starts.
  static PosteriorModel custom(ParameterSpace space, LogDensity log_density, Box search_box,
                               std::optional<Sampler> sampler = std::nullopt);

  const ParameterSpace& space() const { return state_->space; }
  Family family() const { return state_->family; }
  const std::optional<Hyperparameters>& hyperparameters() const { return state_->params; }
  bool has_direct_sampler() const { return static_cast<bool>(state_->sampler); }
  const Sampler& sampler() const { return state_->sampler; }
  const Box& search_box() const { return state_->box; }

  /// Log-potential at theta; -inf off the support. Throws on dimension
  /// mismatch.
  double log_potential(const Point& theta) const;

  /// Log-potential without the dimension check, for hot loops.
  double log_potential_unchecked(const Point& theta) const { return state_->log_density(theta); }

 private:
  struct State {
    ParameterSpace space;
    Family family;
    std::optional<Hyperparameters> params;
    LogDensity log_density;
    Sampler sampler;
    Box box;
  };
  explicit PosteriorModel(std::shared_ptr<const State> state) : state_(std::move(state)) {}

  std::shared_ptr<const State> state_;
};

Hyperparameters update_hyperparameters(const Hyperparameters& prior, const DataSet& data);

/// p_n(theta) proportional to p(x | theta) p_0(theta) for a conjugate prior.
PosteriorModel conjugate_posterior_update(const Hyperparameters& prior, const DataSet& data);

inline double log_posterior_potential(const PosteriorModel& model, const Point& theta) {
  return model.log_potential(theta);
}

/// Per-observation Fisher information at an interior point, in free
/// coordinates. `known_variance` applies to the known-variance normal family.
Eigen::MatrixXd fisher_information(Family family, const Point& theta, double known_variance = 1.0);

/// Draws n observations at theta0 and returns their sufficient statistics.
/// Identical seeds give identical data.
DataSet simulate_data(Family family, const Point& theta0, std::int64_t n, std::uint64_t seed,
                      double known_variance = 1.0);

}  // namespace fbst
