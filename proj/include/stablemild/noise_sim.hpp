#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "stablemild/levy_model.hpp"
#include "stablemild/random.hpp"

namespace stablemild {

/// Uniform time grid t_k = k T / n on [0, T].
class PathGrid {
  public:
    PathGrid(double t_end, std::size_t n_steps);

    double t_end() const { return t_end_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_nodes() const { return n_steps_ + 1; }
    double dt() const { return t_end_ / static_cast<double>(n_steps_); }
    double time(std::size_t k) const
    {
        return k == n_steps_ ? t_end_ : static_cast<double>(k) * dt();
    }

    /// Index k of the step (t_k, t_{k+1}] containing tau; tau = 0 maps to 0.
    std::size_t step_containing(double tau) const;

    bool operator==(PathGrid const&) const = default;

  private:
    double t_end_;
    std::size_t n_steps_;
};

enum class NoiseRoute { exact, truncated };

struct BigJump {
    double time;
    double size;
};

/// One realisation of Z on a grid: the n increments Z(t_{k+1}) - Z(t_k) and,
/// for the truncated route, the jumps larger than R in absolute value. Big
/// jumps are already included in the increment of the step containing them.
struct NoisePath {
    PathGrid grid;
    std::vector<double> increments;
    std::vector<BigJump> big_jumps;
    NoiseRoute route = NoiseRoute::exact;
    std::optional<double> truncation_level;

    double terminal_value() const;
    std::vector<double> cumulative() const;
};

enum class SmallJumpPolicy {
    gaussian,  // variance-matched Gaussian for jumps below epsilon
    drop,      // compensated jumps below epsilon are discarded
};

struct TruncationOptions {
    double R = 1.0;
    double epsilon = 1e-3;
    SmallJumpPolicy policy = SmallJumpPolicy::gaussian;
    //! Upper limit on the expected number of simulated jumps in
    //! {epsilon < |x| <= R} per path.
    double jump_budget = 1e8;
};

/// Chambers-Mallows-Stuck sampler for increments Z(dt).
class StableSampler {
  public:
    explicit StableSampler(StableCharacteristics const& chars);

    double operator()(double dt, RngStream& rng) const;

    //! Sample of the standardised law S(1, skew, 0).
    double standard(RngStream& rng) const;

    StableLaw const& law() const { return law_; }

  private:
    StableLaw law_;
    double inv_alpha_;
    double shift_;   // arctan(skew tan(pi alpha/2)) / alpha
    double factor_;  // (1 + skew^2 tan^2(pi alpha/2))^{1/(2 alpha)}
};

double sample_stable_increment(StableCharacteristics const& chars, double dt, RngStream& rng);

NoisePath simulate_exact_path(StableCharacteristics const& chars,
                              PathGrid const& grid,
                              SeedSpec seed);

/// Writes n exact increments into out (size n_steps) without allocating.
void simulate_exact_increments(StableSampler const& sampler,
                               PathGrid const& grid,
                               RngStream& rng,
                               std::span<double> out);

/// Levy-Ito route: drift b_R dt, compound-Poisson jumps of size > R recorded
/// explicitly, compensated jumps with epsilon < |x| <= R, and the remainder
/// below epsilon handled per the small-jump policy.
NoisePath simulate_truncated_path(StableCharacteristics const& chars,
                                  PathGrid const& grid,
                                  TruncationOptions const& options,
                                  SeedSpec seed);

/// First arrival time of jumps with |x| > R: Exponential(tail_mass(R)).
double first_big_jump_time(StableCharacteristics const& chars, double R, SeedSpec seed);

/// CSV dumps: "t,Z" (cumulative, starting at (0,0)) and "time,size".
void write_path_csv(NoisePath const& path, std::ostream& out);
void write_jumps_csv(NoisePath const& path, std::ostream& out);

}  // namespace stablemild
