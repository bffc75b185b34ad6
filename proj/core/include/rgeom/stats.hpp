#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rgeom::stats {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

[[nodiscard]] MeanEstimate mean_estimate(std::span<const double> values);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Wilson score interval for a binomial proportion at normal quantile z.
[[nodiscard]] Interval wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Half-width of the Wilson interval at z = 1; the "Wilson half-width" unit
/// used for k-sigma acceptance checks.
[[nodiscard]] double wilson_half_width(std::size_t successes, std::size_t trials);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|. Inputs need not be sorted.
[[nodiscard]] double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic two-sample KS critical value c(alpha) * sqrt((n + m) / (n m)).
[[nodiscard]] double ks_critical(double alpha, std::size_t n, std::size_t m);

/// Sup-norm distance between the empirical CDF of `samples` and `cdf`.
[[nodiscard]] double ks_one_sample(std::span<const double> samples,
                                   const std::function<double(double)>& cdf);

/// Ordinary least-squares fit y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
[[nodiscard]] LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Linear-interpolated quantile of sorted data, q in [0, 1].
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double q);

/// Number of entries of sorted data strictly greater than `threshold`.
[[nodiscard]] std::size_t count_above_sorted(std::span<const double> sorted, double threshold);

/// Number of entries of sorted data greater than or equal to `threshold`.
[[nodiscard]] std::size_t count_at_least_sorted(std::span<const double> sorted, double threshold);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // not excess: 3 for a Gaussian
  double skewness_se = 0.0;
  double kurtosis_se = 0.0;
  double variance_se = 0.0;
};
[[nodiscard]] Moments moments(std::span<const double> values);

/// Standard Gaussian upper tail P{Z > z}.
[[nodiscard]] double gaussian_upper_tail(double z);

/// Runs body(i) for i in [0, count), split over `threads` workers in
/// contiguous blocks. threads == 0 picks the hardware concurrency.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace rgeom::stats
