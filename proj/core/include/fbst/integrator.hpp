#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "fbst/reference.hpp"
#include "fbst/sampling.hpp"

namespace fbst {

/// W(v) = posterior mass of T(v) = { s(theta) <= v }, estimated from draws.
/// Arguments are log v.
class TruthFunction {
 public:
  TruthFunction(const PosteriorSample& sample, const SurpriseFunction& sf);

  /// Fraction of draws with log s <= log_v.
  double operator()(double log_v) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_log_surprise() const { return sorted_; }

  /// (v, W(v)) at `count` quantile knots of the sampled surprise values.
  std::vector<std::pair<double, double>> knots(std::size_t count = 512) const;

 private:
  std::vector<double> sorted_;
};

inline TruthFunction truth_function(const PosteriorSample& sample, const SurpriseFunction& sf) {
  return TruthFunction(sample, sf);
}

/// Writes "v,W" rows at quantile knots.
void write_truth_curve_csv(std::ostream& out, const TruthFunction& w, std::size_t count = 512);

enum class IntegrationMethod { monte_carlo, quadrature };

std::string_view to_string(IntegrationMethod method);

struct EvalEstimate {
  double ev = 0.0;
  double ev_bar = 1.0;
  double standard_error = 0.0;
  std::size_t draws = 0;
  IntegrationMethod method = IntegrationMethod::monte_carlo;
};

/// ev = W(s*), se = sqrt(ev (1 - ev) / N_eff).
EvalEstimate estimate_evalue(const TruthFunction& w, double log_s_star, double effective_size);

/// ev = W(s*) by deterministic adaptive quadrature of the normalized
/// posterior over { log s <= log_s_star }. Supports spaces of dimension 1 or
/// 2. Throws ValidationError for higher dimensions.
EvalEstimate quadrature_evalue(const PosteriorModel& model, const SurpriseFunction& sf,
                               double log_s_star);

}  // namespace fbst
