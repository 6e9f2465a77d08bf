#include "fuzzwatch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "fuzzwatch/errors.hpp"

namespace fuzzwatch {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double effective_sample_size(std::span<const double> weights) {
  CompensatedSum s1, s2;
  for (double w : weights) {
    s1.add(w);
    s2.add(w * w);
  }
  if (!(s2.value() > 0.0)) return 0.0;
  return s1.value() * s1.value() / s2.value();
}

double ks_distance(std::span<const double> xs, std::span<const double> weights,
                   std::span<const double> ys) {
  if (xs.size() != weights.size()) throw UsageError("ks_distance: weights size mismatch");
  if (xs.empty() || ys.empty()) throw UsageError("ks_distance: empty sample");
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) throw UsageError("ks_distance: zero total weight");
  std::vector<double> sorted_y(ys.begin(), ys.end());
  std::sort(sorted_y.begin(), sorted_y.end());

  // Merge both sorted samples, evaluating both CDFs after each distinct value.
  double fa = 0.0, best = 0.0;
  std::size_t i = 0, j = 0;
  const double ny = static_cast<double>(sorted_y.size());
  while (i < order.size() || j < sorted_y.size()) {
    double x;
    if (j >= sorted_y.size() || (i < order.size() && xs[order[i]] <= sorted_y[j])) {
      x = xs[order[i]];
    } else {
      x = sorted_y[j];
    }
    while (i < order.size() && xs[order[i]] <= x) fa += weights[order[i++]] / total;
    while (j < sorted_y.size() && sorted_y[j] <= x) ++j;
    best = std::max(best, std::abs(fa - static_cast<double>(j) / ny));
  }
  return best;
}

double ks_distance(std::span<const double> xs, std::span<const double> ys) {
  const std::vector<double> ones(xs.size(), 1.0);
  return ks_distance(xs, ones, ys);
}

double rms_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw UsageError("rms_difference: size mismatch");
  CompensatedSum s;
  for (std::size_t k = 0; k < a.size(); ++k) s.add((a[k] - b[k]) * (a[k] - b[k]));
  return std::sqrt(s.value() / static_cast<double>(a.size()));
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("log_log_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("log_log_slope: non-positive value");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double chi_square_p_value(double statistic, std::size_t dof) {
  if (dof == 0) throw UsageError("chi-square needs at least one degree of freedom");
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

}  // namespace fuzzwatch
