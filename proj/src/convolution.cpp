#include "stablemild/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stablemild/bounds.hpp"
#include "stablemild/quadrature.hpp"

namespace stablemild {

SemigroupParams::SemigroupParams(double decay) : decay_(decay)
{
    if (!(decay > 0.0) || !std::isfinite(decay))
    {
        throw std::invalid_argument("semigroup decay rate a must be positive and finite");
    }
}

double SemigroupParams::operator()(double t) const
{
    if (!(t >= 0.0))
    {
        throw std::invalid_argument("semigroup is defined for t >= 0 only");
    }
    return std::exp(-decay_ * t);
}

StateOverflow::StateOverflow(std::size_t step)
    : std::runtime_error("state overflow at step " + std::to_string(step)), step_(step)
{
}

PicardNotConverged::PicardNotConverged(std::vector<double> history)
    : std::runtime_error("Picard iteration did not converge after "
                         + std::to_string(history.size()) + " iterations"),
      history_(std::move(history))
{
}

namespace {

// One pass of the exponential-Euler recursion. Coefficients are evaluated
// along `frozen` when given (the fixed-point operator), otherwise along the
// path being built.
SolutionPath run_scheme(double x0,
                        CoefficientSpec const& coeffs,
                        SemigroupParams const& sg,
                        NoisePath const& noise,
                        SolveOptions const& options,
                        std::vector<double> const* frozen)
{
    PathGrid const& grid = noise.grid;
    std::size_t n = grid.n_steps();
    if (noise.increments.size() != n)
    {
        throw std::invalid_argument("noise path does not match its grid");
    }
    if (frozen && frozen->size() != n + 1)
    {
        throw std::invalid_argument("input path is not defined on the noise grid");
    }

    SolutionPath out{grid, std::vector<double>(n + 1), x0, {}};
    if (options.track_convolution)
    {
        out.convolution.assign(n + 1, 0.0);
    }
    out.values[0] = x0;

    double a = sg.decay();
    double dt = grid.dt();
    double decay_step = std::exp(-a * dt);
    double drift_weight = -std::expm1(-a * dt) / a;
    bool split = options.placement == JumpPlacement::split && !noise.big_jumps.empty();
    std::size_t next_jump = 0;
    double conv = 0.0;

    for (std::size_t k = 0; k < n; ++k)
    {
        double t = grid.time(k);
        double x_coef = frozen ? (*frozen)[k] : out.values[k];
        double drift = coeffs.drift(t, x_coef);
        double noise_term = 0.0;
        double dz = noise.increments[k];

        if (split)
        {
            double t_next = grid.time(k + 1);
            std::size_t first = next_jump;
            while (next_jump < noise.big_jumps.size()
                   && grid.step_containing(noise.big_jumps[next_jump].time) == k)
            {
                dz -= noise.big_jumps[next_jump].size;
                ++next_jump;
            }
            noise_term = decay_step * (coeffs.intensity(t) * coeffs.response(x_coef)) * dz;
            // Pre-jump state inside the step: semigroup plus drift from the
            // left node, plus the earlier jumps of the same step.
            std::vector<std::pair<double, double>> seen;  // (time, response-weighted jump)
            for (std::size_t j = first; j < next_jump; ++j)
            {
                double tau = noise.big_jumps[j].time;
                double s = tau - t;
                double pre = std::exp(-a * s) * x_coef + (-std::expm1(-a * s) / a) * drift;
                for (auto const& [tau_i, term_i] : seen)
                {
                    pre += std::exp(-a * (tau - tau_i)) * term_i;
                }
                double term = coeffs.intensity(tau) * coeffs.response(pre) * noise.big_jumps[j].size;
                seen.emplace_back(tau, term);
                noise_term += std::exp(-a * (t_next - tau)) * term;
            }
        }
        else
        {
            noise_term = decay_step * (coeffs.intensity(t) * coeffs.response(x_coef)) * dz;
        }

        double next = decay_step * out.values[k] + drift_weight * drift + noise_term;
        if (!std::isfinite(next) || std::abs(next) > options.overflow_limit)
        {
            throw StateOverflow(k);
        }
        out.values[k + 1] = next;
        if (options.track_convolution)
        {
            conv = decay_step * conv + noise_term;
            out.convolution[k + 1] = conv;
        }
    }
    return out;
}

double distance(SolutionPath const& x, SolutionPath const& y, PicardOptions const& options)
{
    if (options.metric == PicardMetric::dp)
    {
        return metric_dp(x, y, options.p);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < x.values.size(); ++k)
    {
        double w = std::exp(-options.gamma * x.grid.time(k));
        worst = std::max(worst, w * std::abs(x.values[k] - y.values[k]));
    }
    return worst;
}

// Golden-section maximisation of a unimodal f on [lo, hi].
double golden_max(std::function<double(double)> const& f, double lo, double hi)
{
    constexpr double ratio = 0.6180339887498949;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int iter = 0; iter < 80 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++iter)
    {
        if (f1 < f2)
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
        else
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    return std::max(f1, f2);
}

constexpr std::size_t eta_panels = 1024;
// The kernel e^{-a u} is below e^{-40} relative beyond u = 40 / a.
constexpr double kernel_reach = 40.0;

void check_finite_samples(std::function<double(double)> const& g, double lo, double hi)
{
    for (std::size_t j = 0; j <= 64; ++j)
    {
        double t = lo + (hi - lo) * static_cast<double>(j) / 64.0;
        if (!std::isfinite(g(t)))
        {
            throw std::domain_error("eta: non-finite intensity sample at t = " + std::to_string(t));
        }
    }
}

}  // namespace

SolutionPath euler_solve(double x0,
                         CoefficientSpec const& coeffs,
                         SemigroupParams const& sg,
                         NoisePath const& noise,
                         SolveOptions const& options)
{
    return run_scheme(x0, coeffs, sg, noise, options, nullptr);
}

SolutionPath gamma_apply(SolutionPath const& input,
                         double x0,
                         CoefficientSpec const& coeffs,
                         SemigroupParams const& sg,
                         NoisePath const& noise,
                         SolveOptions const& options)
{
    if (!(input.grid == noise.grid))
    {
        throw std::invalid_argument("gamma_apply: input path and noise use different grids");
    }
    return run_scheme(x0, coeffs, sg, noise, options, &input.values);
}

PicardResult picard_solve(double x0,
                          CoefficientSpec const& coeffs,
                          SemigroupParams const& sg,
                          NoisePath const& noise,
                          double tol,
                          std::size_t max_iter,
                          PicardOptions const& options)
{
    if (!(tol > 0.0))
    {
        throw std::invalid_argument("picard_solve: tol must be positive");
    }
    if (max_iter < 1)
    {
        throw std::invalid_argument("picard_solve: max_iter must be at least 1");
    }
    SolutionPath current{noise.grid, std::vector<double>(noise.grid.n_nodes(), x0), x0, {}};
    std::vector<double> history;
    for (std::size_t iter = 0; iter < max_iter; ++iter)
    {
        SolutionPath next = gamma_apply(current, x0, coeffs, sg, noise, options.solve);
        history.push_back(distance(next, current, options));
        current = std::move(next);
        if (history.back() < tol)
        {
            return {std::move(current), std::move(history)};
        }
    }
    throw PicardNotConverged(std::move(history));
}

double eta(double a, double T, std::function<double(double)> const& g)
{
    if (!(a > 0.0) || !(T > 0.0))
    {
        throw std::invalid_argument("eta: need a > 0 and T > 0");
    }
    check_finite_samples(g, 0.0, T);
    auto g2 = [&g](double s) { return g(s) * g(s); };
    // I(t) = int_0^t e^{-a(t-s)} g^2 ds obeys I(t+d) = e^{-ad} I(t) + int_t^{t+d} ...
    auto advance = [&](double from_value, double from, double to) {
        // Integrated over the lag u = to - s so the exponential is not
        // perturbed by the rounding of s.
        auto kernel = [&](double u) { return std::exp(-a * u) * g2(to - u); };
        return std::exp(-a * (to - from)) * from_value
               + quadrature::integrate(kernel, 0.0, std::min(to - from, kernel_reach / a));
    };
    double step = T / static_cast<double>(eta_panels);
    std::vector<double> values(eta_panels + 1, 0.0);
    std::size_t best = 0;
    for (std::size_t j = 0; j < eta_panels; ++j)
    {
        double from = step * static_cast<double>(j);
        double to = j + 1 == eta_panels ? T : step * static_cast<double>(j + 1);
        values[j + 1] = advance(values[j], from, to);
        if (!std::isfinite(values[j + 1]))
        {
            throw std::domain_error("eta: non-finite integral");
        }
        if (values[j + 1] > values[best])
        {
            best = j + 1;
        }
    }
    double sup = values[best];
    if (best > 0 && best < eta_panels)
    {
        std::size_t left = best - 1;
        double left_t = step * static_cast<double>(left);
        double right_t = step * static_cast<double>(best + 1);
        auto I = [&](double t) { return advance(values[left], left_t, t); };
        sup = std::max(sup, golden_max(I, left_t, right_t));
    }
    return std::sqrt(std::max(sup, 0.0));
}

double eta_window(double a, double T, std::function<double(double)> const& g, double h)
{
    if (!(a > 0.0) || !(T > 0.0))
    {
        throw std::invalid_argument("eta_window: need a > 0 and T > 0");
    }
    if (!(h > 0.0))
    {
        throw std::invalid_argument("eta_window: window h must be positive");
    }
    check_finite_samples(g, 0.0, T + h);
    auto J = [&](double t) {
        auto kernel = [&](double u) {
            double gs = g(t + h - u);
            return std::exp(-a * u) * gs * gs;
        };
        return quadrature::integrate(kernel, 0.0, std::min(h, kernel_reach / a));
    };
    double step = T / static_cast<double>(eta_panels);
    std::size_t best = 0;
    double best_value = J(0.0);
    for (std::size_t j = 1; j <= eta_panels; ++j)
    {
        double value = J(j == eta_panels ? T : step * static_cast<double>(j));
        if (value > best_value)
        {
            best_value = value;
            best = j;
        }
    }
    if (best > 0 && best < eta_panels)
    {
        double lo = step * static_cast<double>(best - 1);
        double hi = step * static_cast<double>(best + 1);
        best_value = std::max(best_value, golden_max(J, lo, hi));
    }
    return std::sqrt(std::max(best_value, 0.0));
}

}  // namespace stablemild
