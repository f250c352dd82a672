#include "stablemild/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>

namespace stablemild::stats {

double clopper_pearson_upper(std::size_t successes, std::size_t trials, double confidence)
{
    if (trials == 0 || successes > trials)
    {
        throw std::invalid_argument("clopper_pearson_upper: need 0 <= successes <= trials, trials > 0");
    }
    if (successes == trials)
    {
        return 1.0;
    }
    boost::math::beta_distribution<double> dist(static_cast<double>(successes) + 1.0,
                                                static_cast<double>(trials - successes));
    return boost::math::quantile(dist, confidence);
}

Interval clopper_pearson_interval(std::size_t successes, std::size_t trials, double confidence)
{
    if (trials == 0 || successes > trials)
    {
        throw std::invalid_argument("clopper_pearson_interval: need 0 <= successes <= trials, trials > 0");
    }
    double tail = 0.5 * (1.0 - confidence);
    double k = static_cast<double>(successes);
    double n = static_cast<double>(trials);
    double lower = successes == 0
                       ? 0.0
                       : boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1.0), tail);
    double upper = successes == trials
                       ? 1.0
                       : boost::math::quantile(boost::math::beta_distribution<double>(k + 1.0, n - k),
                                               1.0 - tail);
    return {lower, upper};
}

std::vector<double> bootstrap_mean_upper(std::vector<std::vector<double>> const& columns,
                                         std::size_t resamples,
                                         double confidence,
                                         SeedSpec seed)
{
    if (columns.empty() || columns.front().empty())
    {
        throw std::invalid_argument("bootstrap_mean_upper: empty sample");
    }
    if (resamples == 0)
    {
        throw std::invalid_argument("bootstrap_mean_upper: need at least one resample");
    }
    std::size_t n = columns.front().size();
    for (auto const& column : columns)
    {
        if (column.size() != n)
        {
            throw std::invalid_argument("bootstrap_mean_upper: columns differ in length");
        }
    }
    RngStream rng(seed, 0xB007u);
    std::vector<std::vector<double>> means(columns.size(), std::vector<double>(resamples));
    std::vector<double> sums(columns.size());
    for (std::size_t r = 0; r < resamples; ++r)
    {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
        {
            auto index = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
            index = std::min(index, n - 1);
            for (std::size_t j = 0; j < columns.size(); ++j)
            {
                sums[j] += columns[j][index];
            }
        }
        for (std::size_t j = 0; j < columns.size(); ++j)
        {
            means[j][r] = sums[j] / static_cast<double>(n);
        }
    }
    std::vector<double> upper(columns.size());
    auto rank = static_cast<std::size_t>(std::ceil(confidence * static_cast<double>(resamples)));
    rank = std::clamp<std::size_t>(rank, 1, resamples) - 1;
    for (std::size_t j = 0; j < columns.size(); ++j)
    {
        std::nth_element(means[j].begin(), means[j].begin() + static_cast<std::ptrdiff_t>(rank), means[j].end());
        upper[j] = means[j][rank];
    }
    return upper;
}

double mean(std::span<double const> values)
{
    if (values.empty())
    {
        throw std::invalid_argument("mean of an empty sample");
    }
    double total = 0.0;
    for (double v : values)
    {
        total += v;
    }
    return total / static_cast<double>(values.size());
}

double ks_statistic(std::vector<double> samples, std::function<double(double)> const& cdf)
{
    if (samples.empty())
    {
        throw std::invalid_argument("ks_statistic: empty sample");
    }
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
    {
        throw std::invalid_argument("ks_statistic: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size())
    {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
        {
            ++i;
        }
        while (j < b.size() && b[j] <= x)
        {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double d, double n_effective)
{
    if (!(n_effective > 0.0))
    {
        throw std::invalid_argument("ks_pvalue: effective sample size must be positive");
    }
    double root = std::sqrt(n_effective);
    double lambda = (root + 0.12 + 0.11 / root) * d;
    if (lambda < 1e-3)
    {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k)
    {
        double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16)
        {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {
std::vector<double> ranks(std::span<double const> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return values[l] < values[r]; });
    std::vector<double> result(values.size());
    for (std::size_t i = 0; i < order.size();)
    {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
        {
            ++j;
        }
        double average = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
        {
            result[order[k]] = average;
        }
        i = j + 1;
    }
    return result;
}
}  // namespace

double spearman(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
    {
        throw std::invalid_argument("spearman: need two samples of equal size >= 2");
    }
    auto rx = ranks(x);
    auto ry = ranks(y);
    double mx = mean(rx);
    double my = mean(ry);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i)
    {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
    {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace stablemild::stats
