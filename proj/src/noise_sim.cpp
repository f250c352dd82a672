#include "stablemild/noise_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "stablemild/csv.hpp"

namespace stablemild {

namespace {
constexpr std::uint32_t big_jump_substream = 1;
constexpr std::uint32_t first_jump_substream = 2;

double jump_sign(StableCharacteristics const& chars, RngStream& rng)
{
    double p_plus = chars.c_plus() / chars.total_weight();
    if (p_plus == 1.0)
    {
        return 1.0;
    }
    if (p_plus == 0.0)
    {
        return -1.0;
    }
    return rng.uniform() < p_plus ? 1.0 : -1.0;
}
}  // namespace

PathGrid::PathGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps)
{
    if (!(t_end > 0.0) || !std::isfinite(t_end))
    {
        throw std::invalid_argument("PathGrid: horizon T must be positive and finite");
    }
    if (n_steps == 0)
    {
        throw std::invalid_argument("PathGrid: n_steps must be positive");
    }
}

std::size_t PathGrid::step_containing(double tau) const
{
    if (!(tau >= 0.0 && tau <= t_end_))
    {
        throw std::out_of_range("PathGrid: time outside [0, T]");
    }
    if (tau == 0.0)
    {
        return 0;
    }
    auto k = static_cast<std::size_t>(std::ceil(tau / dt())) - 1;
    k = std::min(k, n_steps_ - 1);
    // Guard against rounding in tau / dt.
    while (k > 0 && tau <= time(k))
    {
        --k;
    }
    while (k + 1 < n_steps_ && tau > time(k + 1))
    {
        ++k;
    }
    return k;
}

double NoisePath::terminal_value() const
{
    double total = 0.0;
    for (double dz : increments)
    {
        total += dz;
    }
    return total;
}

std::vector<double> NoisePath::cumulative() const
{
    std::vector<double> values(increments.size() + 1, 0.0);
    for (std::size_t k = 0; k < increments.size(); ++k)
    {
        values[k + 1] = values[k] + increments[k];
    }
    return values;
}

//---------------------------------------------------------------------------//

StableSampler::StableSampler(StableCharacteristics const& chars)
    : law_(stable_law(chars)), inv_alpha_(1.0 / chars.alpha()), shift_(0.0), factor_(1.0)
{
    if (law_.alpha != 1.0)
    {
        double tan_term = law_.skew * std::tan(std::numbers::pi * law_.alpha / 2.0);
        shift_ = std::atan(tan_term) / law_.alpha;
        factor_ = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * law_.alpha));
    }
}

double StableSampler::standard(RngStream& rng) const
{
    double v = std::numbers::pi * (rng.uniform() - 0.5);
    if (law_.alpha == 1.0)
    {
        return std::tan(v);
    }
    double w = rng.exponential();
    double alpha = law_.alpha;
    double shifted = alpha * (v + shift_);
    return factor_ * std::sin(shifted) / std::pow(std::cos(v), inv_alpha_)
           * std::pow(std::cos(v - shifted) / w, (1.0 - alpha) * inv_alpha_);
}

double StableSampler::operator()(double dt, RngStream& rng) const
{
    double scale = law_.alpha == 1.0 ? law_.scale * dt : law_.scale * std::pow(dt, inv_alpha_);
    return scale * standard(rng) + law_.location * dt;
}

double sample_stable_increment(StableCharacteristics const& chars, double dt, RngStream& rng)
{
    if (!(dt > 0.0))
    {
        throw std::invalid_argument("sample_stable_increment: dt must be positive");
    }
    return StableSampler(chars)(dt, rng);
}

void simulate_exact_increments(StableSampler const& sampler,
                               PathGrid const& grid,
                               RngStream& rng,
                               std::span<double> out)
{
    if (out.size() != grid.n_steps())
    {
        throw std::invalid_argument("simulate_exact_increments: output size mismatch");
    }
    auto const& law = sampler.law();
    double dt = grid.dt();
    double scale = law.alpha == 1.0 ? law.scale * dt : law.scale * std::pow(dt, 1.0 / law.alpha);
    double shift = law.location * dt;
    for (double& dz : out)
    {
        dz = scale * sampler.standard(rng) + shift;
    }
}

NoisePath simulate_exact_path(StableCharacteristics const& chars,
                              PathGrid const& grid,
                              SeedSpec seed)
{
    NoisePath path{grid, std::vector<double>(grid.n_steps()), {}, NoiseRoute::exact, std::nullopt};
    RngStream rng(seed);
    simulate_exact_increments(StableSampler(chars), grid, rng, path.increments);
    return path;
}

NoisePath simulate_truncated_path(StableCharacteristics const& chars,
                                  PathGrid const& grid,
                                  TruncationOptions const& options,
                                  SeedSpec seed)
{
    double R = options.R;
    double eps = options.epsilon;
    if (!(R >= 1.0))
    {
        throw std::invalid_argument("simulate_truncated_path: truncation level R must be >= 1");
    }
    if (!(eps > 0.0 && eps < R))
    {
        throw std::invalid_argument("simulate_truncated_path: epsilon must lie in (0, R)");
    }
    double alpha = chars.alpha();
    double mid_rate = annulus_mass(chars, eps, R);
    if (mid_rate * grid.t_end() > options.jump_budget)
    {
        throw std::invalid_argument("simulate_truncated_path: epsilon = " + std::to_string(eps)
                                    + " gives an expected " + std::to_string(mid_rate * grid.t_end())
                                    + " jumps per path, above the budget "
                                    + std::to_string(options.jump_budget));
    }

    NoisePath path{grid, std::vector<double>(grid.n_steps(), 0.0), {}, NoiseRoute::truncated, R};
    RngStream rng(seed);
    double dt = grid.dt();

    double drift = truncated_drift(chars, R) * dt;
    double compensation = annulus_first_moment(chars, eps, R) * dt;
    double small_sd = options.policy == SmallJumpPolicy::gaussian
                          ? std::sqrt(small_second_moment(chars, eps) * dt)
                          : 0.0;
    double eps_pow = std::pow(eps, -alpha);
    double R_pow = std::pow(R, -alpha);
    double neg_inv_alpha = -1.0 / alpha;

    for (double& dz : path.increments)
    {
        double value = drift - compensation;
        std::uint64_t count = rng.poisson(mid_rate * dt);
        for (std::uint64_t j = 0; j < count; ++j)
        {
            // Inverse CDF of |x|^{-alpha-1} restricted to (eps, R].
            double magnitude = std::pow(eps_pow - rng.uniform() * (eps_pow - R_pow), neg_inv_alpha);
            value += jump_sign(chars, rng) * magnitude;
        }
        if (small_sd > 0.0)
        {
            value += small_sd * rng.normal();
        }
        dz = value;
    }

    double big_rate = tail_mass(chars, R);
    if (big_rate > 0.0)
    {
        RngStream jump_rng(seed, big_jump_substream);
        double tau = jump_rng.exponential(big_rate);
        while (tau <= grid.t_end())
        {
            double size = jump_sign(chars, jump_rng) * R * std::pow(jump_rng.uniform(), neg_inv_alpha);
            path.big_jumps.push_back({tau, size});
            path.increments[grid.step_containing(tau)] += size;
            tau += jump_rng.exponential(big_rate);
        }
    }
    return path;
}

double first_big_jump_time(StableCharacteristics const& chars, double R, SeedSpec seed)
{
    double rate = tail_mass(chars, R);
    if (!(rate > 0.0))
    {
        throw std::invalid_argument("first_big_jump_time: zero jump rate");
    }
    RngStream rng(seed, first_jump_substream);
    return rng.exponential(rate);
}

void write_path_csv(NoisePath const& path, std::ostream& out)
{
    out << "t,Z\n";
    auto values = path.cumulative();
    for (std::size_t k = 0; k < values.size(); ++k)
    {
        out << csv::number(path.grid.time(k)) << ',' << csv::number(values[k]) << '\n';
    }
}

void write_jumps_csv(NoisePath const& path, std::ostream& out)
{
    out << "time,size\n";
    for (auto const& jump : path.big_jumps)
    {
        out << csv::number(jump.time) << ',' << csv::number(jump.size) << '\n';
    }
}

}  // namespace stablemild
