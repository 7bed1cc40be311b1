#include "fbst/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "fbst/errors.hpp"

namespace fbst {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::direct: return "direct";
    case SamplerKind::mcmc: return "mcmc";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kBlockSize = 4096;
constexpr double kTargetAcceptance = 0.3;

}  // namespace

PosteriorSample sample_posterior_direct(const PosteriorModel& model, std::size_t n,
                                        std::uint64_t seed, std::size_t threads) {
  if (!model.has_direct_sampler())
    throw SamplingError("model has no direct sampler; use mcmc");
  if (n == 0) throw ValidationError("sample size must be positive");
  const auto dim = static_cast<Eigen::Index>(model.space().ambient_dimension());
  PosteriorSample sample;
  sample.draws.resize(static_cast<Eigen::Index>(n), dim);
  sample.kind = SamplerKind::direct;
  sample.seed = seed;
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  parallel_for(blocks, threads, [&](std::size_t block) {
    Rng rng(derive_seed(seed, 0xD1EC7, block));
    Eigen::VectorXd draw(dim);
    const std::size_t end = std::min(n, (block + 1) * kBlockSize);
    for (std::size_t i = block * kBlockSize; i < end; ++i) {
      model.sampler()(rng, draw);
      sample.draws.row(static_cast<Eigen::Index>(i)) = draw.transpose();
    }
  });
  sample.effective_size = static_cast<double>(n);
  return sample;
}

PosteriorSample sample_posterior_mcmc(const PosteriorModel& model, std::size_t n,
                                      std::uint64_t seed, const McmcTuning& tuning) {
  if (n == 0) throw ValidationError("sample size must be positive");
  if (!(tuning.step_scale > 0.0) || !std::isfinite(tuning.step_scale))
    throw ValidationError("mcmc step scale must be positive");
  if (!(tuning.burn_in_fraction >= 0.0) || tuning.burn_in_fraction >= 1.0)
    throw ValidationError("burn-in fraction must lie in [0, 1)");
  if (tuning.thin == 0) throw ValidationError("thinning interval must be positive");

  const ParameterSpace& space = model.space();
  const Box& box = model.search_box();
  const auto d = static_cast<Eigen::Index>(space.dimension());
  auto target = [&](const Eigen::VectorXd& x) {
    const Point theta = space.from_free(x);
    if (!space.in_support(theta)) return -kInf;
    const double v = model.log_potential_unchecked(theta);
    return std::isnan(v) ? -kInf : v;
  };

  Eigen::VectorXd x = box.center();
  double fx = target(x);
  for (std::size_t i = 0; i < 256; ++i) {
    const Eigen::VectorXd y = box.at(halton_point(i, static_cast<std::size_t>(d), seed));
    const double fy = target(y);
    if (fy > fx) {
      x = y;
      fx = fy;
    }
  }
  if (!(fx > -kInf)) throw SamplingError("mcmc could not find a point with finite log-potential");

  Rng rng(derive_seed(seed, 0x4D434D43));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;

  const Eigen::VectorXd width = box.upper - box.lower;
  Eigen::MatrixXd chol = (tuning.step_scale * width).asDiagonal();
  double log_scale = 0.0;
  const std::size_t burn_in =
      static_cast<std::size_t>(std::ceil(tuning.burn_in_fraction * static_cast<double>(n)));

  // Burn-in: Robbins-Monro on the global scale, covariance from burn-in draws.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  std::size_t seen = 0;
  std::size_t window_accepts = 0;
  constexpr std::size_t kWindow = 100;
  auto propose = [&](double scale) {
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z[k] = normal(rng);
    return Eigen::VectorXd(x + scale * (chol * z));
  };
  auto step = [&](double scale) {
    const Eigen::VectorXd y = propose(scale);
    const double fy = target(y);
    if (fy > -kInf && std::log(uniform(rng)) < fy - fx) {
      x = y;
      fx = fy;
      return true;
    }
    return false;
  };
  for (std::size_t i = 1; i <= burn_in; ++i) {
    window_accepts += step(std::exp(log_scale)) ? 1 : 0;
    ++seen;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / static_cast<double>(seen);
    scatter += delta * (x - mean).transpose();
    if (i % kWindow == 0) {
      const double rate = static_cast<double>(window_accepts) / kWindow;
      log_scale += (rate - kTargetAcceptance) * 2.0 / std::sqrt(static_cast<double>(i / kWindow));
      window_accepts = 0;
    }
    if (i % (5 * kWindow) == 0 && seen > static_cast<std::size_t>(10 * d + 100)) {
      Eigen::MatrixXd cov = scatter / static_cast<double>(seen - 1);
      cov.diagonal().array() += 1e-12 * (1.0 + cov.diagonal().array().abs());
      const Eigen::LLT<Eigen::MatrixXd> llt(cov * (2.38 * 2.38 / static_cast<double>(d)));
      if (llt.info() == Eigen::Success) {
        chol = llt.matrixL();
        log_scale = 0.0;
      }
    }
  }

  PosteriorSample sample;
  sample.kind = SamplerKind::mcmc;
  sample.seed = seed;
  sample.draws.resize(static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(space.ambient_dimension()));
  const double scale = std::exp(log_scale);
  std::size_t accepts = 0;
  std::vector<double> log_density_trace(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < tuning.thin; ++k) accepts += step(scale) ? 1 : 0;
    sample.draws.row(static_cast<Eigen::Index>(i)) = space.from_free(x).transpose();
    log_density_trace[i] = fx;
  }

  McmcDiagnostics diag;
  diag.acceptance_rate = static_cast<double>(accepts) / static_cast<double>(n * tuning.thin);
  diag.burn_in = burn_in;
  diag.thin = tuning.thin;
  diag.step_scale = scale;
  if (diag.acceptance_rate < tuning.min_acceptance || diag.acceptance_rate > tuning.max_acceptance) {
    diag.warnings.push_back("acceptance rate " + std::to_string(diag.acceptance_rate) +
                            " outside the target band after adaptation");
  }

  double ess = effective_sample_size(log_density_trace);
  std::vector<double> column(n);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) column[i] = sample.draws(static_cast<Eigen::Index>(i), k);
    ess = std::min(ess, effective_sample_size(column));
  }
  sample.effective_size = ess;
  sample.diagnostics = std::move(diag);
  return sample;
}

double effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  auto autocovariance = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (series[i] - mean) * (series[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double gamma0 = autocovariance(0);
  if (!(gamma0 > 0.0)) return static_cast<double>(n);
  // Initial positive sequence: sum pairs (rho_2k + rho_2k+1) while positive.
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (autocovariance(2 * k) + autocovariance(2 * k + 1)) / gamma0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0);
  return static_cast<double>(n) / tau;
}

}  // namespace fbst
