#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ulab::stats {

/// Upper quantile of the chi-square distribution: P(X <= x) = level.
double chi_square_quantile(int dof, double level);

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double critical = 0;  // 99% point
  bool accepted = false;
};

/// Pearson goodness of fit of counts against probabilities (same length,
/// probabilities summing to 1).  Bins with expected count below 5 are merged
/// into their right neighbour first.
ChiSquare chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs, double level = 0.99);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double p);
double mean(std::span<const double> v);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0;
  double p_value = 0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace ulab::stats
