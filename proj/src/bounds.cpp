#include "stablemild/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stablemild {

double conjugate_exponent(double p, ConjugateConvention convention)
{
    if (!(p > 0.0))
    {
        throw std::invalid_argument("conjugate exponent: p must be positive");
    }
    if (p > 1.0 || convention == ConjugateConvention::literal)
    {
        if (p == 1.0)
        {
            return std::numeric_limits<double>::infinity();
        }
        return p / (p - 1.0);
    }
    return 1.0;
}

double conjugate_ratio(double p, ConjugateConvention convention)
{
    double q = conjugate_exponent(p, convention);
    return std::isinf(q) ? 0.0 : p / q;
}

double k_nu(BoundInputs const& in, double horizon)
{
    double phi2 = in.phi_inf * in.phi_inf;
    return phi2 * (8.0 * in.b * in.b / in.a + 8.0 * in.C1 * in.C2 / in.a + 4.0 * in.C2)
           + horizon * in.C1;
}

double tail_bound(BoundInputs const& in, double x)
{
    if (!(x > 0.0) || x < in.eta)
    {
        return 1.0;
    }
    return std::min(1.0, std::pow(in.eta / x, in.beta) * k_nu(in, in.T));
}

double convolution_moment_bound(BoundInputs const& in, double eta_value, double horizon)
{
    if (!(in.p > 0.0 && in.p < in.beta))
    {
        throw std::invalid_argument("moment bounds require p in (0, beta)");
    }
    return std::pow(eta_value, in.p) * (1.0 + k_nu(in, horizon) * in.p / (in.beta - in.p));
}

double moment_bound(BoundInputs const& in)
{
    double p = in.p;
    double noise = convolution_moment_bound(in, in.eta, in.T);
    double three_p = std::pow(3.0, p);
    double exponent = three_p * std::pow(1.0 / in.a, conjugate_ratio(p, in.convention)) * in.C * in.T;
    return three_p * (in.x0_moment + noise) * std::exp(exponent);
}

double gronwall_bound(double K1, double rate, double K2, double t)
{
    return K1 * std::exp((rate + K2) * t);
}

double contraction_constant(BoundInputs const& in, std::function<double(double)> const& g)
{
    double p = in.p;
    if (!(p >= 1.0))
    {
        throw std::invalid_argument("contraction_constant applies to p >= 1");
    }
    if (!(in.gamma > 0.0))
    {
        throw std::invalid_argument("contraction_constant: gamma must be positive");
    }
    double q = conjugate_exponent(p, in.convention);
    // (1/(a q gamma))^{p/q} -> 1 as q -> infinity.
    double drift_factor = std::isinf(q) ? 1.0 : std::pow(1.0 / (in.a * q * in.gamma), p / q);
    double eta_gamma = eta(in.a + in.gamma, in.T, g);
    double noise = std::pow(eta_gamma, p) * (1.0 + k_nu(in, in.T) * p / (in.beta - p));
    return std::pow(2.0, p - 1.0) * (in.L_F * drift_factor + noise);
}

double choose_gamma(BoundInputs in, std::function<double(double)> const& g, double target)
{
    constexpr double max_gamma = 0x1.0p64;
    auto value = [&](double gamma) {
        in.gamma = gamma;
        return contraction_constant(in, g);
    };
    double hi = 1.0;
    if (value(hi) <= target)
    {
        return hi;
    }
    double lo = hi;
    while (value(hi) > target)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > max_gamma)
        {
            throw std::runtime_error("choose_gamma: no gamma up to 2^64 gives a contraction");
        }
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-10 * hi; ++iter)
    {
        double mid = 0.5 * (lo + hi);
        if (value(mid) <= target)
        {
            hi = mid;
        }
        else
        {
            lo = mid;
        }
    }
    return hi;
}

StrongCondition check_strong_condition(BoundInputs const& in)
{
    double p = in.p;
    if (!(p > 0.0 && p <= 1.0))
    {
        throw std::invalid_argument("check_strong_condition applies to p in (0, 1]");
    }
    double two_p = std::pow(2.0, p);
    double drift_term = two_p * std::pow(in.L_F, p)
                        * std::pow(1.0 / in.a, conjugate_ratio(p, in.convention));
    double noise_term = two_p * convolution_moment_bound(in, in.eta, in.T);
    double lhs = drift_term + noise_term;
    return {lhs < 1.0, lhs};
}

double strong_condition_threshold(std::function<double(double)> const& lhs_of_amplitude,
                                  double initial_guess)
{
    if (!(lhs_of_amplitude(0.0) < 1.0))
    {
        throw std::invalid_argument(
            "strong condition fails even with zero amplitude; no threshold exists");
    }
    double lo = 0.0;
    double hi = initial_guess > 0.0 ? initial_guess : 1.0;
    while (lhs_of_amplitude(hi) < 1.0)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300)
        {
            throw std::runtime_error("strong condition holds for every amplitude");
        }
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter)
    {
        double mid = 0.5 * (lo + hi);
        if (lhs_of_amplitude(mid) < 1.0)
        {
            lo = mid;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {
void require_same_grid(PathGrid const& a, PathGrid const& b, std::size_t na, std::size_t nb)
{
    if (!(a == b) || na != nb || na != a.n_nodes())
    {
        throw std::invalid_argument("metric requires paths on the same grid");
    }
}

double trapezoid(std::vector<double> const& values, double dt)
{
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k)
    {
        total += 0.5 * (values[k] + values[k + 1]) * dt;
    }
    return total;
}
}  // namespace

double metric_dp(SolutionPath const& x, SolutionPath const& y, double p)
{
    require_same_grid(x.grid, y.grid, x.values.size(), y.values.size());
    std::vector<double> integrand(x.values.size());
    for (std::size_t k = 0; k < integrand.size(); ++k)
    {
        integrand[k] = std::pow(std::abs(x.values[k] - y.values[k]), p);
    }
    return trapezoid(integrand, x.grid.dt());
}

double metric_dp(std::span<SolutionPath const> xs, std::span<SolutionPath const> ys, double p)
{
    if (xs.empty() || xs.size() != ys.size())
    {
        throw std::invalid_argument("ensemble metric needs two non-empty ensembles of equal size");
    }
    std::vector<double> integrand(xs.front().values.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        require_same_grid(xs.front().grid, xs[i].grid, integrand.size(), xs[i].values.size());
        require_same_grid(xs[i].grid, ys[i].grid, xs[i].values.size(), ys[i].values.size());
        for (std::size_t k = 0; k < integrand.size(); ++k)
        {
            integrand[k] += std::pow(std::abs(xs[i].values[k] - ys[i].values[k]), p);
        }
    }
    for (double& v : integrand)
    {
        v /= static_cast<double>(xs.size());
    }
    return trapezoid(integrand, xs.front().grid.dt());
}

double norm_gamma(std::span<SolutionPath const> ensemble, double p, double gamma)
{
    if (ensemble.empty())
    {
        throw std::invalid_argument("norm_gamma: empty ensemble");
    }
    if (!(p >= 1.0))
    {
        throw std::invalid_argument("norm_gamma: p must be at least 1");
    }
    auto const& grid = ensemble.front().grid;
    std::size_t nodes = ensemble.front().values.size();
    double best = 0.0;
    for (std::size_t k = 0; k < nodes; ++k)
    {
        double mean = 0.0;
        for (auto const& path : ensemble)
        {
            require_same_grid(grid, path.grid, nodes, path.values.size());
            mean += std::pow(std::abs(path.values[k]), p);
        }
        mean /= static_cast<double>(ensemble.size());
        best = std::max(best, std::exp(-gamma * grid.time(k)) * std::pow(mean, 1.0 / p));
    }
    return best;
}

}  // namespace stablemild
