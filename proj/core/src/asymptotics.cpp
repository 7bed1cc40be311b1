#include "fbst/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "fbst/errors.hpp"

namespace fbst {

namespace {

void check_probability(double c, const char* what) {
  if (!(c >= 0.0 && c <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

double chi2_cdf(std::size_t k, double x) {
  if (std::isnan(x)) throw ValidationError("chi-square CDF evaluated at NaN");
  if (x < 0.0) return 0.0;
  if (k == 0) return 1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * static_cast<double>(k), 0.5 * x);
}

double chi2_quantile(std::size_t k, double c) {
  check_probability(c, "chi-square level");
  if (k == 0 || c == 0.0) return 0.0;
  if (c == 1.0) return std::numeric_limits<double>::infinity();
  return 2.0 * boost::math::gamma_p_inv(0.5 * static_cast<double>(k), c);
}

double qq_confidence(std::size_t t, std::size_t h, double c) {
  if (h > t) throw ValidationError("hypothesis dimension exceeds parameter dimension");
  if (t == 0) throw ValidationError("parameter dimension must be positive");
  check_probability(c, "confidence level");
  if (c == 0.0) return 0.0;
  return chi2_cdf(t - h, chi2_quantile(t, c));
}

double qq_inverse(std::size_t t, std::size_t h, double q) {
  if (!(h < t)) throw ValidationError("QQ is invertible only for h < t");
  check_probability(q, "QQ level");
  if (q == 0.0) return 0.0;
  return chi2_cdf(t, chi2_quantile(t - h, q));
}

double standardized_evalue(std::size_t t, std::size_t h, double ev_bar) {
  if (!(h < t)) {
    throw ValidationError("standardized e-value needs h < t (got t=" + std::to_string(t) +
                          ", h=" + std::to_string(h) + ")");
  }
  return 1.0 - qq_confidence(t, h, ev_bar);
}

void DecisionThresholds::validate() const {
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0))
    throw ValidationError("decision thresholds must satisfy 0 < c1 < c2 < 1");
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::reject: return "reject";
    case Verdict::neutral: return "neutral";
    case Verdict::accept: return "accept";
  }
  return "unknown";
}

Decision decide(double sev, const DecisionThresholds& thresholds) {
  thresholds.validate();
  check_probability(sev, "standardized e-value");
  Decision d;
  d.sev = sev;
  d.thresholds = thresholds;
  if (sev < thresholds.c1) d.verdict = Verdict::reject;
  else if (sev < thresholds.c2) d.verdict = Verdict::neutral;
  else d.verdict = Verdict::accept;
  return d;
}

double disjunction_evalue(std::span<const double> evalues) {
  if (evalues.empty()) throw ValidationError("disjunction of no hypotheses");
  for (double ev : evalues) check_probability(ev, "e-value");
  return *std::max_element(evalues.begin(), evalues.end());
}

double ks_uniform_statistic(std::span<const double> values) {
  if (values.empty()) throw ValidationError("KS statistic of an empty sample");
  std::vector<double> u(values.begin(), values.end());
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::clamp(u[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - x, x - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace fbst
