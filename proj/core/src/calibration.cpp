#include "fbst/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fbst/errors.hpp"
#include "fbst/random.hpp"

namespace fbst {

namespace {

constexpr std::size_t kMinCalibrationReplicates = 200;

double known_variance_of(const Hyperparameters& prior) {
  if (const auto* p = std::get_if<NormalParams>(&prior)) return p->known_variance;
  return 1.0;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::vector<double> simulate_ev_bars(const Scenario& scenario, const Point& theta0, std::int64_t n,
                                     std::size_t replicates, std::uint64_t seed,
                                     std::size_t threads) {
  if (n <= 0) throw ValidationError("sample size n must be positive");
  validate(scenario.prior);
  const Family family = family_of(scenario.prior);
  std::size_t categories = 0;
  if (const auto* d = std::get_if<DirichletParams>(&scenario.prior)) categories = d->alpha.size();
  const ParameterSpace space = family_space(family, categories);
  space.check_dimension(theta0);
  if (!space.contains(theta0)) throw ValidationError("theta0 lies outside the parameter space");

  std::vector<double> ev_bars(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(n), r);
    const DataSet data = simulate_data(family, theta0, n, s, known_variance_of(scenario.prior));
    const PosteriorModel model = conjugate_posterior_update(scenario.prior, data);
    const SurpriseFunction sf(model, ReferenceDensity::of_kind(scenario.reference, model));
    EvaluationSettings settings = scenario.settings;
    settings.seed = s;
    settings.optimizer.seed = s;
    settings.threads = 1;
    settings.keep_truth_function = false;
    ev_bars[r] = evaluate(sf, scenario.hypothesis, settings).estimate.ev_bar;
  });
  return ev_bars;
}

CalibrationRow calibrate_critical_level(const Scenario& scenario, const Point& theta0,
                                        std::int64_t n, std::size_t replicates, double alpha,
                                        std::uint64_t seed, std::size_t threads) {
  if (replicates < kMinCalibrationReplicates)
    throw ValidationError("calibration needs at least 200 replicates");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in [0, 1)");
  if (!scenario.hypothesis.evaluate(theta0).feasible)
    throw ValidationError("theta0 does not satisfy the hypothesis");
  std::vector<double> ev_bars = simulate_ev_bars(scenario, theta0, n, replicates, seed, threads);
  std::sort(ev_bars.begin(), ev_bars.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(replicates) - 1e-9));
  const std::size_t index = std::clamp<std::size_t>(rank, 1, replicates) - 1;
  return CalibrationRow{n, ev_bars[index], replicates, seed};
}

ConsistencyTable consistency_study(const Scenario& scenario, const Point& theta0,
                                   const std::vector<std::int64_t>& n_grid,
                                   std::size_t replicates, std::uint64_t seed,
                                   std::size_t threads) {
  if (n_grid.empty()) throw ValidationError("consistency study needs a nonempty n grid");
  if (replicates == 0) throw ValidationError("replicates must be positive");
  const std::size_t t = scenario.hypothesis.space_dimension();
  const std::size_t h = scenario.hypothesis.dimension();
  ConsistencyTable table;
  for (const std::int64_t n : n_grid) {
    const std::vector<double> ev_bars =
        simulate_ev_bars(scenario, theta0, n, replicates, seed, threads);
    std::vector<double> transformed(ev_bars.size());
    for (std::size_t i = 0; i < ev_bars.size(); ++i)
      transformed[i] = scenario.hypothesis.is_sharp() ? qq_confidence(t, h, ev_bars[i]) : ev_bars[i];
    table.rows.push_back(
        ConsistencyRow{n, median(ev_bars), ks_uniform_statistic(transformed), replicates});
  }
  return table;
}

void write_csv(std::ostream& out, const CalibrationTable& table) {
  const auto old = out.precision(17);
  out << "n,c_n,replicates,seed\n";
  for (const auto& row : table.rows)
    out << row.n << ',' << row.critical_level << ',' << row.replicates << ',' << row.seed << '\n';
  out.precision(old);
}

void write_csv(std::ostream& out, const ConsistencyTable& table) {
  const auto old = out.precision(17);
  out << "n,median_ev_bar,ks_statistic,replicates\n";
  for (const auto& row : table.rows) {
    out << row.n << ',' << row.median_ev_bar << ',' << row.ks_statistic << ',' << row.replicates
        << '\n';
  }
  out.precision(old);
}

}  // namespace fbst
