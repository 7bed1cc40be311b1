#include "fbst/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fbst/errors.hpp"

namespace fbst {

std::string_view to_string(IntegrationMethod method) {
  switch (method) {
    case IntegrationMethod::monte_carlo: return "monte_carlo";
    case IntegrationMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

TruthFunction::TruthFunction(const PosteriorSample& sample, const SurpriseFunction& sf) {
  if (static_cast<std::size_t>(sample.draws.cols()) != sf.space().ambient_dimension())
    throw ValidationError("sample dimension does not match the surprise function");
  sorted_.resize(sample.size());
  Point theta(sample.draws.cols());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    theta = sample.draws.row(static_cast<Eigen::Index>(i)).transpose();
    sorted_[i] = sf.log_surprise_unchecked(theta);
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double TruthFunction::operator()(double log_v) const {
  if (std::isnan(log_v)) throw ValidationError("truth function evaluated at NaN");
  if (sorted_.empty()) return 0.0;
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), log_v) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, double>> TruthFunction::knots(std::size_t count) const {
  std::vector<std::pair<double, double>> out;
  if (sorted_.empty() || count == 0) return out;
  const std::size_t last = sorted_.size() - 1;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t index =
        count == 1 ? last
                   : static_cast<std::size_t>(std::llround(static_cast<double>(k) *
                                                           static_cast<double>(last) /
                                                           static_cast<double>(count - 1)));
    const double log_v = sorted_[index];
    out.emplace_back(std::exp(log_v), (*this)(log_v));
  }
  return out;
}

void write_truth_curve_csv(std::ostream& out, const TruthFunction& w, std::size_t count) {
  const auto old = out.precision(17);
  out << "v,W\n";
  for (const auto& [v, value] : w.knots(count)) out << v << ',' << value << '\n';
  out.precision(old);
}

EvalEstimate estimate_evalue(const TruthFunction& w, double log_s_star, double effective_size) {
  if (std::isnan(log_s_star)) throw ValidationError("missing supremum for the e-value");
  if (w.size() == 0) throw ValidationError("empty posterior sample");
  if (!(effective_size > 0.0)) throw ValidationError("effective sample size must be positive");
  EvalEstimate e;
  e.ev = w(log_s_star);
  e.ev_bar = 1.0 - e.ev;
  e.standard_error = std::sqrt(e.ev * e.ev_bar / effective_size);
  e.draws = w.size();
  e.method = IntegrationMethod::monte_carlo;
  return e;
}

}  // namespace fbst
