#include "stablemild/random.hpp"

#include <numbers>
#include <stdexcept>

namespace stablemild {

RngStream::RngStream(SeedSpec seed, std::uint32_t substream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed.master_seed),
                      static_cast<std::uint32_t>(seed.master_seed >> 32),
                      static_cast<std::uint32_t>(seed.path_index),
                      static_cast<std::uint32_t>(seed.path_index >> 32),
                      substream};
    engine_.seed(seq);
}

double RngStream::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_normal_;
    }
    // Box-Muller
    double radius = std::sqrt(-2.0 * std::log(uniform()));
    double angle = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t RngStream::poisson(double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
    {
        throw std::invalid_argument("poisson: mean must be finite and non-negative");
    }
    std::uint64_t count = 0;
    // Split large means into chunks so the multiplicative method stays
    // accurate; a sum of independent Poisson variates is Poisson.
    constexpr double chunk = 16.0;
    while (mean > chunk)
    {
        count += poisson(chunk);
        mean -= chunk;
    }
    double limit = std::exp(-mean);
    double product = uniform();
    while (product > limit)
    {
        ++count;
        product *= uniform();
    }
    return count;
}

}  // namespace stablemild
