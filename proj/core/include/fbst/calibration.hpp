#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fbst/model.hpp"
#include "fbst/pipeline.hpp"
#include "fbst/reference.hpp"

namespace fbst {

/// Everything needed to re-run a test on fresh data drawn at theta0.
struct Scenario {
  Hyperparameters prior;
  ReferenceKind reference = ReferenceKind::uniform;
  Hypothesis hypothesis;
  EvaluationSettings settings;
};

struct CalibrationRow {
  std::int64_t n = 0;
  double critical_level = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

struct CalibrationTable {
  std::vector<CalibrationRow> rows;
};

struct ConsistencyRow {
  std::int64_t n = 0;
  double median_ev_bar = 0.0;
  double ks_statistic = 0.0;
  std::size_t replicates = 0;
};

struct ConsistencyTable {
  std::vector<ConsistencyRow> rows;
};

/// ev-bar for `replicates` data sets of size n simulated at theta0. Replicate
/// r uses seed derive_seed(seed, n, r); results are in replicate order.
std::vector<double> simulate_ev_bars(const Scenario& scenario, const Point& theta0, std::int64_t n,
                                     std::size_t replicates, std::uint64_t seed,
                                     std::size_t threads = 1);

/// Empirical (1 - alpha) quantile of ev-bar under theta0 in H, using the order
/// statistic with index ceil((1 - alpha) R).
CalibrationRow calibrate_critical_level(const Scenario& scenario, const Point& theta0,
                                        std::int64_t n, std::size_t replicates, double alpha,
                                        std::uint64_t seed, std::size_t threads = 1);

/// One row per n: median ev-bar and the KS distance of QQ(t, h, ev-bar) from
/// Uniform[0,1].
ConsistencyTable consistency_study(const Scenario& scenario, const Point& theta0,
                                   const std::vector<std::int64_t>& n_grid,
                                   std::size_t replicates, std::uint64_t seed,
                                   std::size_t threads = 1);

void write_csv(std::ostream& out, const CalibrationTable& table);
void write_csv(std::ostream& out, const ConsistencyTable& table);

}  // namespace fbst
