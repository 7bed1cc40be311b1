#include "fbst/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "fbst/errors.hpp"

namespace fbst {

namespace {

// k log x with 0 log 0 = 0.
double xlogy(double k, double x) {
  if (k == 0.0) return 0.0;
  return k * std::log(x);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::int64_t as_count(double x, const char* what) {
  require(std::isfinite(x) && x >= 0.0 && std::floor(x) == x,
          std::string(what) + " must be a nonnegative integer");
  return static_cast<std::int64_t>(x);
}

constexpr double kTailProbability = 1e-10;

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::beta_binomial: return "beta_binomial";
    case Family::dirichlet_multinomial: return "dirichlet_multinomial";
    case Family::normal_known_variance: return "normal_known_variance";
    case Family::normal_mean_variance: return "normal_mean_variance";
    case Family::gamma_poisson: return "gamma_poisson";
    case Family::custom: return "custom";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::beta_binomial, Family::dirichlet_multinomial,
                   Family::normal_known_variance, Family::normal_mean_variance,
                   Family::gamma_poisson}) {
    if (to_string(f) == name) return f;
  }
  throw ValidationError("unknown model family '" + std::string(name) + "'");
}

// --- DataSet ---------------------------------------------------------------

DataSet DataSet::binomial(std::int64_t successes, std::int64_t trials) {
  require(trials >= 1, "binomial data needs trials >= 1");
  require(successes >= 0 && successes <= trials, "binomial data needs 0 <= successes <= trials");
  return DataSet{Family::beta_binomial, BinomialStats{successes, trials}};
}

DataSet DataSet::multinomial(std::vector<std::int64_t> counts) {
  require(counts.size() >= 2, "multinomial data needs at least two categories");
  for (auto c : counts) require(c >= 0, "multinomial counts must be nonnegative");
  require(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) >= 1,
          "multinomial data needs at least one observation");
  return DataSet{Family::dirichlet_multinomial, MultinomialStats{std::move(counts)}};
}

DataSet DataSet::normal(Family family, std::int64_t n, double sum, double sum_squares) {
  require(family == Family::normal_known_variance || family == Family::normal_mean_variance,
          "normal statistics need a normal family");
  require(n >= 1, "normal data needs n >= 1");
  require(std::isfinite(sum) && std::isfinite(sum_squares), "normal statistics must be finite");
  require(sum_squares >= 0.0, "sum of squares must be nonnegative");
  return DataSet{family, NormalStats{n, sum, sum_squares}};
}

DataSet DataSet::poisson(std::int64_t total, double exposure) {
  require(total >= 0, "Poisson total must be nonnegative");
  require(positive_finite(exposure), "Poisson exposure must be positive");
  return DataSet{Family::gamma_poisson, PoissonStats{total, exposure}};
}

DataSet DataSet::from_observations(Family family, std::span<const double> observations,
                                   std::size_t categories) {
  require(!observations.empty(), "no observations");
  switch (family) {
    case Family::beta_binomial: {
      std::int64_t successes = 0;
      for (double x : observations) {
        require(x == 0.0 || x == 1.0, "Bernoulli observations must be 0 or 1");
        successes += x == 1.0 ? 1 : 0;
      }
      return binomial(successes, static_cast<std::int64_t>(observations.size()));
    }
    case Family::dirichlet_multinomial: {
      require(categories >= 2, "multinomial observations need the category count");
      std::vector<std::int64_t> counts(categories, 0);
      for (double x : observations) {
        const auto k = as_count(x, "category index");
        require(static_cast<std::size_t>(k) < categories, "category index out of range");
        ++counts[static_cast<std::size_t>(k)];
      }
      return multinomial(std::move(counts));
    }
    case Family::normal_known_variance:
    case Family::normal_mean_variance: {
      // Summing in sorted order makes the statistics independent of input order.
      std::vector<double> sorted(observations.begin(), observations.end());
      std::sort(sorted.begin(), sorted.end());
      double sum = 0.0;
      double sum_squares = 0.0;
      for (double x : sorted) {
        require(std::isfinite(x), "normal observations must be finite");
        sum += x;
        sum_squares += x * x;
      }
      return normal(family, static_cast<std::int64_t>(sorted.size()), sum, sum_squares);
    }
    case Family::gamma_poisson: {
      std::int64_t total = 0;
      for (double x : observations) total += as_count(x, "Poisson observation");
      return poisson(total, static_cast<double>(observations.size()));
    }
    case Family::custom: break;
  }
  throw ValidationError("custom models have no built-in data reduction");
}

std::int64_t DataSet::size() const {
  return std::visit(Overloaded{
                        [](const BinomialStats& s) { return s.trials; },
                        [](const MultinomialStats& s) {
                          return std::accumulate(s.counts.begin(), s.counts.end(),
                                                 std::int64_t{0});
                        },
                        [](const NormalStats& s) { return s.n; },
                        [](const PoissonStats& s) { return static_cast<std::int64_t>(s.exposure); },
                    },
                    stats);
}

// --- Hyperparameters -------------------------------------------------------

Family family_of(const Hyperparameters& params) {
  return std::visit(Overloaded{
                        [](const BetaParams&) { return Family::beta_binomial; },
                        [](const DirichletParams&) { return Family::dirichlet_multinomial; },
                        [](const NormalParams&) { return Family::normal_known_variance; },
                        [](const NormalInverseGammaParams&) {
                          return Family::normal_mean_variance;
                        },
                        [](const GammaParams&) { return Family::gamma_poisson; },
                    },
                    params);
}

void validate(const Hyperparameters& params) {
  std::visit(Overloaded{
                 [](const BetaParams& p) {
                   require(positive_finite(p.a) && positive_finite(p.b),
                           "Beta hyperparameters must be positive");
                 },
                 [](const DirichletParams& p) {
                   require(p.alpha.size() >= 2, "Dirichlet needs at least two categories");
                   for (double a : p.alpha)
                     require(positive_finite(a), "Dirichlet hyperparameters must be positive");
                 },
                 [](const NormalParams& p) {
                   require(std::isfinite(p.mean), "normal prior mean must be finite");
                   require(positive_finite(p.variance) && positive_finite(p.known_variance),
                           "normal variances must be positive");
                 },
                 [](const NormalInverseGammaParams& p) {
                   require(std::isfinite(p.mean), "normal prior mean must be finite");
                   require(positive_finite(p.kappa) && positive_finite(p.shape) &&
                               positive_finite(p.scale),
                           "normal-inverse-gamma kappa, shape and scale must be positive");
                 },
                 [](const GammaParams& p) {
                   require(positive_finite(p.shape) && positive_finite(p.rate),
                           "Gamma hyperparameters must be positive");
                 },
             },
             params);
}

ParameterSpace family_space(Family family, std::size_t categories) {
  switch (family) {
    case Family::beta_binomial: return ParameterSpace::unit_interval("theta");
    case Family::dirichlet_multinomial: return ParameterSpace::simplex(categories);
    case Family::normal_known_variance: return ParameterSpace::real_line("mu");
    case Family::normal_mean_variance:
      return ParameterSpace({"mu", "sigma2"}, {Interval{-kInf, kInf}, Interval{0.0, kInf}});
    case Family::gamma_poisson: return ParameterSpace::positive_half_line("lambda");
    case Family::custom: break;
  }
  throw ValidationError("custom models have no built-in parameter space");
}

Hyperparameters update_hyperparameters(const Hyperparameters& prior, const DataSet& data) {
  validate(prior);
  const Family family = family_of(prior);
  if (family != data.family) {
    throw ValidationError("prior family " + std::string(to_string(family)) +
                          " does not match data family " + std::string(to_string(data.family)));
  }
  return std::visit(
      Overloaded{
          [&](const BetaParams& p) -> Hyperparameters {
            const auto& s = std::get<BinomialStats>(data.stats);
            return BetaParams{p.a + static_cast<double>(s.successes),
                              p.b + static_cast<double>(s.trials - s.successes)};
          },
          [&](const DirichletParams& p) -> Hyperparameters {
            const auto& s = std::get<MultinomialStats>(data.stats);
            require(s.counts.size() == p.alpha.size(),
                    "category count of data differs from the Dirichlet prior");
            DirichletParams out = p;
            for (std::size_t i = 0; i < s.counts.size(); ++i)
              out.alpha[i] += static_cast<double>(s.counts[i]);
            return out;
          },
          [&](const NormalParams& p) -> Hyperparameters {
            const auto& s = std::get<NormalStats>(data.stats);
            const double precision = 1.0 / p.variance + static_cast<double>(s.n) / p.known_variance;
            const double mean = (p.mean / p.variance + s.sum / p.known_variance) / precision;
            return NormalParams{mean, 1.0 / precision, p.known_variance};
          },
          [&](const NormalInverseGammaParams& p) -> Hyperparameters {
            const auto& s = std::get<NormalStats>(data.stats);
            const double n = static_cast<double>(s.n);
            const double kappa = p.kappa + n;
            const double mean = (p.kappa * p.mean + s.sum) / kappa;
            const double scale = p.scale + 0.5 * (s.sum_squares + p.kappa * p.mean * p.mean -
                                                  kappa * mean * mean);
            return NormalInverseGammaParams{mean, kappa, p.shape + 0.5 * n,
                                            std::max(scale, p.scale)};
          },
          [&](const GammaParams& p) -> Hyperparameters {
            const auto& s = std::get<PoissonStats>(data.stats);
            return GammaParams{p.shape + static_cast<double>(s.total), p.rate + s.exposure};
          },
      },
      prior);
}

// --- PosteriorModel --------------------------------------------------------

namespace {

struct ClosedForm {
  ParameterSpace space;
  PosteriorModel::LogDensity log_density;
  PosteriorModel::Sampler sampler;
  Box box;
};

Box scalar_box(double lo, double hi) {
  Box box;
  box.lower = Eigen::VectorXd::Constant(1, lo);
  box.upper = Eigen::VectorXd::Constant(1, hi);
  return box;
}

ClosedForm closed_form(const BetaParams& p) {
  auto space = family_space(Family::beta_binomial);
  const double log_norm = std::lgamma(p.a + p.b) - std::lgamma(p.a) - std::lgamma(p.b);
  auto log_density = [a = p.a, b = p.b, log_norm](const Point& theta) {
    const double x = theta[0];
    if (!(x >= 0.0 && x <= 1.0)) return -kInf;
    return xlogy(a - 1.0, x) + xlogy(b - 1.0, 1.0 - x) + log_norm;
  };
  auto sampler = [a = p.a, b = p.b](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    std::gamma_distribution<double> ga(a);
    std::gamma_distribution<double> gb(b);
    const double x = ga(rng);
    const double y = gb(rng);
    out[0] = x / (x + y);
  };
  return {space, log_density, sampler, scalar_box(0.0, 1.0)};
}

ClosedForm closed_form(const DirichletParams& p) {
  const std::size_t k = p.alpha.size();
  auto space = family_space(Family::dirichlet_multinomial, k);
  double log_norm = std::lgamma(std::accumulate(p.alpha.begin(), p.alpha.end(), 0.0));
  for (double a : p.alpha) log_norm -= std::lgamma(a);
  auto log_density = [alpha = p.alpha, log_norm](const Point& theta) {
    double sum = 0.0;
    double value = log_norm;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double x = theta[static_cast<Eigen::Index>(i)];
      if (!(x >= 0.0 && x <= 1.0)) return -kInf;
      sum += x;
      value += xlogy(alpha[i] - 1.0, x);
    }
    if (std::abs(sum - 1.0) > 1e-12) return -kInf;
    return value;
  };
  auto sampler = [alpha = p.alpha](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      std::gamma_distribution<double> g(alpha[i]);
      const double x = g(rng);
      out[static_cast<Eigen::Index>(i)] = x;
      total += x;
    }
    out /= total;
  };
  Box box;
  box.lower = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k - 1));
  box.upper = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(k - 1));
  return {space, log_density, sampler, box};
}

ClosedForm closed_form(const NormalParams& p) {
  auto space = family_space(Family::normal_known_variance);
  const double sd = std::sqrt(p.variance);
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * p.variance);
  auto log_density = [m = p.mean, v = p.variance, log_norm](const Point& theta) {
    const double x = theta[0];
    if (!std::isfinite(x)) return -kInf;
    return log_norm - 0.5 * (x - m) * (x - m) / v;
  };
  auto sampler = [m = p.mean, sd](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    std::normal_distribution<double> normal(m, sd);
    out[0] = normal(rng);
  };
  return {space, log_density, sampler, scalar_box(p.mean - 7.0 * sd, p.mean + 7.0 * sd)};
}

ClosedForm closed_form(const NormalInverseGammaParams& p) {
  auto space = family_space(Family::normal_mean_variance);
  const double log_norm = p.shape * std::log(p.scale) - std::lgamma(p.shape) +
                          0.5 * std::log(p.kappa / (2.0 * std::numbers::pi));
  auto log_density = [p, log_norm](const Point& theta) {
    const double mu = theta[0];
    const double s2 = theta[1];
    if (!std::isfinite(mu) || !(s2 > 0.0) || !std::isfinite(s2)) return -kInf;
    const double d = mu - p.mean;
    return log_norm - (p.shape + 1.5) * std::log(s2) - (p.scale + 0.5 * p.kappa * d * d) / s2;
  };
  auto sampler = [p](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    std::gamma_distribution<double> precision(p.shape, 1.0 / p.scale);
    const double s2 = 1.0 / precision(rng);
    std::normal_distribution<double> normal(p.mean, std::sqrt(s2 / p.kappa));
    out[0] = normal(rng);
    out[1] = s2;
  };
  const boost::math::students_t_distribution<double> t(2.0 * p.shape);
  const double half_width = boost::math::quantile(t, 1.0 - kTailProbability) *
                            std::sqrt(p.scale / (p.shape * p.kappa));
  const boost::math::inverse_gamma_distribution<double> ig(p.shape, p.scale);
  Box box;
  box.lower = Eigen::Vector2d(p.mean - half_width, boost::math::quantile(ig, kTailProbability));
  box.upper = Eigen::Vector2d(p.mean + half_width,
                              boost::math::quantile(ig, 1.0 - kTailProbability));
  return {space, log_density, sampler, box};
}

ClosedForm closed_form(const GammaParams& p) {
  auto space = family_space(Family::gamma_poisson);
  const double log_norm = p.shape * std::log(p.rate) - std::lgamma(p.shape);
  auto log_density = [p, log_norm](const Point& theta) {
    const double x = theta[0];
    if (!(x >= 0.0) || !std::isfinite(x)) return -kInf;
    return log_norm + xlogy(p.shape - 1.0, x) - p.rate * x;
  };
  auto sampler = [p](Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
    std::gamma_distribution<double> g(p.shape, 1.0 / p.rate);
    out[0] = g(rng);
  };
  const boost::math::gamma_distribution<double> g(p.shape, 1.0 / p.rate);
  return {space, log_density, sampler,
          scalar_box(boost::math::quantile(g, kTailProbability),
                     boost::math::quantile(g, 1.0 - kTailProbability))};
}

}  // namespace

PosteriorModel PosteriorModel::from_hyperparameters(Hyperparameters params) {
  validate(params);
  ClosedForm form = std::visit([](const auto& p) { return closed_form(p); }, params);
  const Family family = family_of(params);
  return PosteriorModel(std::make_shared<const State>(
      State{std::move(form.space), family, std::move(params), std::move(form.log_density),
            std::move(form.sampler), std::move(form.box)}));
}

PosteriorModel PosteriorModel::custom(ParameterSpace space, LogDensity log_density,
                                      Box search_box, std::optional<Sampler> sampler) {
  require(static_cast<bool>(log_density), "custom model needs a log-density");
  require(search_box.dimension() == space.dimension() &&
              static_cast<std::size_t>(search_box.upper.size()) == space.dimension(),
          "search box dimension must equal the space dimension");
  require(search_box.lower.allFinite() && search_box.upper.allFinite() &&
              (search_box.lower.array() < search_box.upper.array()).all(),
          "search box must be finite and non-empty");
  return PosteriorModel(std::make_shared<const State>(
      State{std::move(space), Family::custom, std::nullopt, std::move(log_density),
            sampler ? std::move(*sampler) : Sampler{}, std::move(search_box)}));
}

double PosteriorModel::log_potential(const Point& theta) const {
  state_->space.check_dimension(theta);
  if (!state_->space.in_support(theta)) return -kInf;
  const double value = state_->log_density(theta);
  return std::isnan(value) ? -kInf : value;
}

PosteriorModel conjugate_posterior_update(const Hyperparameters& prior, const DataSet& data) {
  return PosteriorModel::from_hyperparameters(update_hyperparameters(prior, data));
}

// --- Fisher information ----------------------------------------------------

Eigen::MatrixXd fisher_information(Family family, const Point& theta, double known_variance) {
  auto interior = [&](bool ok) {
    if (!ok) throw ValidationError("Fisher information needs an interior point");
  };
  switch (family) {
    case Family::beta_binomial: {
      require(theta.size() == 1, "Bernoulli Fisher information needs a scalar parameter");
      const double x = theta[0];
      interior(x > 0.0 && x < 1.0);
      return Eigen::MatrixXd::Constant(1, 1, 1.0 / (x * (1.0 - x)));
    }
    case Family::dirichlet_multinomial: {
      require(theta.size() >= 2, "multinomial Fisher information needs K >= 2");
      interior((theta.array() > 0.0).all() && std::abs(theta.sum() - 1.0) <= 1e-10);
      const Eigen::Index t = theta.size() - 1;
      const double last = theta[t];
      Eigen::MatrixXd g = Eigen::MatrixXd::Constant(t, t, 1.0 / last);
      for (Eigen::Index i = 0; i < t; ++i) g(i, i) += 1.0 / theta[i];
      return g;
    }
    case Family::normal_known_variance: {
      require(theta.size() == 1, "normal-mean Fisher information needs a scalar parameter");
      require(positive_finite(known_variance), "known variance must be positive");
      interior(std::isfinite(theta[0]));
      return Eigen::MatrixXd::Constant(1, 1, 1.0 / known_variance);
    }
    case Family::normal_mean_variance: {
      require(theta.size() == 2, "normal Fisher information needs (mu, sigma2)");
      const double s2 = theta[1];
      interior(std::isfinite(theta[0]) && s2 > 0.0 && std::isfinite(s2));
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
      g(0, 0) = 1.0 / s2;
      g(1, 1) = 1.0 / (2.0 * s2 * s2);
      return g;
    }
    case Family::gamma_poisson: {
      require(theta.size() == 1, "Poisson Fisher information needs a scalar parameter");
      interior(theta[0] > 0.0 && std::isfinite(theta[0]));
      return Eigen::MatrixXd::Constant(1, 1, 1.0 / theta[0]);
    }
    case Family::custom: break;
  }
  throw ValidationError("no Fisher information for custom models");
}

// --- Simulation ------------------------------------------------------------

DataSet simulate_data(Family family, const Point& theta0, std::int64_t n, std::uint64_t seed,
                      double known_variance) {
  require(n >= 1, "simulation needs n >= 1");
  const std::size_t categories = family == Family::dirichlet_multinomial
                                     ? static_cast<std::size_t>(theta0.size())
                                     : 0;
  const ParameterSpace space = family_space(family, categories);
  space.check_dimension(theta0);
  require(space.contains(theta0), "theta0 lies outside the support");
  Rng rng(mix_seed(seed));
  switch (family) {
    case Family::beta_binomial: {
      std::binomial_distribution<std::int64_t> draw(n, std::clamp(theta0[0], 0.0, 1.0));
      return DataSet::binomial(draw(rng), n);
    }
    case Family::dirichlet_multinomial: {
      std::vector<std::int64_t> counts(categories, 0);
      std::int64_t remaining = n;
      double mass = 1.0;
      for (std::size_t i = 0; i + 1 < categories && remaining > 0; ++i) {
        const double p = mass > 0.0 ? std::clamp(theta0[static_cast<Eigen::Index>(i)] / mass,
                                                 0.0, 1.0)
                                    : 0.0;
        std::binomial_distribution<std::int64_t> draw(remaining, p);
        counts[i] = draw(rng);
        remaining -= counts[i];
        mass -= theta0[static_cast<Eigen::Index>(i)];
      }
      counts.back() += remaining;
      return DataSet::multinomial(std::move(counts));
    }
    case Family::normal_known_variance:
    case Family::normal_mean_variance: {
      const double variance = family == Family::normal_known_variance ? known_variance : theta0[1];
      require(positive_finite(variance), "normal simulation needs a positive variance");
      std::normal_distribution<double> draw(theta0[0], std::sqrt(variance));
      std::vector<double> xs(static_cast<std::size_t>(n));
      for (auto& x : xs) x = draw(rng);
      return DataSet::from_observations(family, xs);
    }
    case Family::gamma_poisson: {
      if (theta0[0] == 0.0) return DataSet::poisson(0, static_cast<double>(n));
      std::poisson_distribution<std::int64_t> draw(theta0[0] * static_cast<double>(n));
      return DataSet::poisson(draw(rng), static_cast<double>(n));
    }
    case Family::custom: break;
  }
  throw ValidationError("custom models cannot be simulated");
}

}  // namespace fbst
