#pragma once

// Small numerical helpers: compensated sums and weighted empirical distributions.

#include <cstddef>
#include <span>
#include <vector>

namespace fuzzwatch {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// Effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

/// sup |F_a - F_b| between a weighted empirical CDF and an unweighted one.
double ks_distance(std::span<const double> xs, std::span<const double> weights,
                   std::span<const double> ys);

/// Both samples unweighted.
double ks_distance(std::span<const double> xs, std::span<const double> ys);

/// Root mean square of a - b; throws UsageError on size mismatch.
double rms_difference(std::span<const double> a, std::span<const double> b);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Upper-tail p-value of Pearson's chi-square statistic with `dof` degrees of freedom.
double chi_square_p_value(double statistic, std::size_t dof);

}  // namespace fuzzwatch
