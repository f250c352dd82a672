#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stablemild/random.hpp"

namespace stablemild::stats {

/// One-sided Clopper-Pearson upper confidence limit for a binomial
/// proportion with `successes` out of `trials`.
double clopper_pearson_upper(std::size_t successes, std::size_t trials, double confidence);

struct Interval {
    double lower;
    double upper;
};

/// Two-sided Clopper-Pearson interval.
Interval clopper_pearson_interval(std::size_t successes, std::size_t trials, double confidence);

/// Percentile-bootstrap upper confidence limits of the means of several
/// equally long columns. The same resample indices are shared by all
/// columns; the stream is fully determined by `seed`.
std::vector<double> bootstrap_mean_upper(std::vector<std::vector<double>> const& columns,
                                         std::size_t resamples,
                                         double confidence,
                                         SeedSpec seed);

double mean(std::span<double const> values);

/// sup_x |F_n(x) - F(x)|.
double ks_statistic(std::vector<double> samples, std::function<double(double)> const& cdf);

/// sup_x |F_n(x) - G_m(x)|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Asymptotic Kolmogorov p-value P(D > d) for effective sample size n
/// (n m / (n + m) in the two-sample case), with Stephens' correction.
double ks_pvalue(double d, double n_effective);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<double const> x, std::span<double const> y);

}  // namespace stablemild::stats
