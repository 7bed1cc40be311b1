#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace fbst {

/// Chi-square CDF with k degrees of freedom. k = 0 is the point mass at 0.
double chi2_cdf(std::size_t k, double x);

/// Inverse of chi2_cdf in x; returns +inf at c = 1 and 0 at c = 0.
double chi2_quantile(std::size_t k, double c);

/// QQ(t, h, c) = Chi2(t - h, Chi2^-1(t, c)): asymptotic distribution of
/// ev-bar under H, for t = dim(Theta) and h = dim(H).
double qq_confidence(std::size_t t, std::size_t h, double c);

/// Inverse of qq_confidence in c for h < t.
double qq_inverse(std::size_t t, std::size_t h, double q);

/// sev = 1 - QQ(t, h, ev_bar). Requires h < t.
double standardized_evalue(std::size_t t, std::size_t h, double ev_bar);

struct DecisionThresholds {
  double c1 = 0.05;
  double c2 = 0.95;

  /// Throws ValidationError unless 0 < c1 < c2 < 1.
  void validate() const;
};

enum class Verdict { reject, neutral, accept };

std::string_view to_string(Verdict verdict);

struct Decision {
  Verdict verdict = Verdict::neutral;
  double sev = 0.0;
  DecisionThresholds thresholds;
};

/// Reject on [0, c1), Neutral on [c1, c2), Accept on [c2, 1].
Decision decide(double sev, const DecisionThresholds& thresholds = {});

/// Support of a disjunction: the largest e-value among the disjuncts.
double disjunction_evalue(std::span<const double> evalues);

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and
/// Uniform[0,1].
double ks_uniform_statistic(std::span<const double> values);

}  // namespace fbst
