#include <benchmark/benchmark.h>

#include <nlohmann/json.hpp>

#include "fbst/asymptotics.hpp"
#include "fbst/harness.hpp"
#include "fbst/integrator.hpp"
#include "fbst/optimizer.hpp"

namespace {

using nlohmann::json;

json beta_spec(const std::string& method, std::size_t draws) {
  return {{"schema_version", 1},
          {"model",
           {{"family", "beta_binomial"},
            {"prior", {{"a", 1}, {"b", 1}}},
            {"data", {{"successes", 3}, {"trials", 4}}}}},
          {"hypothesis", {{"type", "point"}, {"fix", {{"theta", 0.5}}}}},
          {"sampling", {{"method", method}, {"draws", draws}, {"seed", 1}}}};
}

fbst::SurpriseFunction hardy_weinberg_surprise() {
  const auto model = fbst::conjugate_posterior_update(fbst::DirichletParams{{1, 1, 1}},
                                                      fbst::DataSet::multinomial({5, 2, 3}));
  return fbst::SurpriseFunction(model, fbst::ReferenceDensity::uniform());
}

void BM_QqConfidence(benchmark::State& state) {
  double c = 0.0;
  for (auto _ : state) {
    c = c >= 0.99 ? 0.01 : c + 0.01;
    benchmark::DoNotOptimize(fbst::qq_confidence(5, 2, c));
  }
}
BENCHMARK(BM_QqConfidence);

void BM_QuadratureEvalueBeta(benchmark::State& state) {
  const auto model = fbst::conjugate_posterior_update(fbst::BetaParams{1, 1}, fbst::DataSet::binomial(3, 4));
  const fbst::SurpriseFunction sf(model, fbst::ReferenceDensity::uniform());
  const double log_s_star = sf.log_surprise(fbst::Point::Constant(1, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(fbst::quadrature_evalue(model, sf, log_s_star));
}
BENCHMARK(BM_QuadratureEvalueBeta);

void BM_QuadratureEvalueHardyWeinberg(benchmark::State& state) {
  const fbst::SurpriseFunction sf = hardy_weinberg_surprise();
  const fbst::Hypothesis hw = fbst::Hypothesis::hardy_weinberg(sf.posterior().space());
  const double log_s_star = fbst::sup_surprise_hypothesis(sf, hw).log_value;
  for (auto _ : state)
    benchmark::DoNotOptimize(fbst::quadrature_evalue(sf.posterior(), sf, log_s_star));
}
BENCHMARK(BM_QuadratureEvalueHardyWeinberg)->Unit(benchmark::kMillisecond);

void BM_ConstrainedOptimizer(benchmark::State& state) {
  const fbst::SurpriseFunction sf = hardy_weinberg_surprise();
  const fbst::Hypothesis hw = fbst::Hypothesis::hardy_weinberg(sf.posterior().space());
  const auto route = static_cast<fbst::ConstrainedRoute>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fbst::sup_surprise_hypothesis(sf, hw, {}, route));
}
BENCHMARK(BM_ConstrainedOptimizer)
    ->Arg(static_cast<int>(fbst::ConstrainedRoute::embedding))
    ->Arg(static_cast<int>(fbst::ConstrainedRoute::penalty))
    ->Unit(benchmark::kMillisecond);

void BM_MonteCarloPipeline(benchmark::State& state) {
  const fbst::TestSpec spec =
      fbst::parse_test_spec(beta_spec("direct", static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(fbst::run_test(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloPipeline)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
