#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stablemild {

/// Identifies one reproducible random stream. Streams for distinct
/// path_index values (or substreams) are seeded independently.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;

    bool operator==(SeedSpec const&) const = default;
};

/// Per-path random stream. A 64-bit Mersenne Twister seeded through
/// std::seed_seq from (master_seed, path_index, substream); all variates are
/// derived with explicit transforms so results do not depend on the
/// standard library's distribution implementations.
class RngStream {
  public:
    explicit RngStream(SeedSpec seed, std::uint32_t substream = 0);

    //! Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    //! Uniform on (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

    double normal();

    std::uint64_t poisson(double mean);

    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace stablemild
