#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stablemild/bounds.hpp"
#include "stablemild/coefficients.hpp"
#include "stablemild/convolution.hpp"
#include "stablemild/levy_model.hpp"
#include "stablemild/noise_sim.hpp"

namespace stablemild {

/// User-supplied constants that replace the certified ones in the bounds.
/// Each must be at least the certified value.
struct ConstantOverrides {
    std::optional<double> L_F;
    std::optional<double> C;
    std::optional<double> phi_inf;
    bool operator==(ConstantOverrides const&) const = default;
};

/// Everything that defines the equation and how its noise is simulated.
struct Scenario {
    StableCharacteristics chars = StableCharacteristics::symmetric(1.5, 0.5);
    SemigroupParams semigroup{1.0};
    DriftPreset drift;
    IntensityPreset intensity;
    ResponsePreset response;
    ConstantOverrides overrides;
    double x0 = 1.0;
    //! x0 ~ Uniform[x0 - spread, x0 + spread] per path when positive.
    double x0_spread = 0.0;
    NoiseRoute route = NoiseRoute::exact;
    TruncationOptions truncation;
    JumpPlacement placement = JumpPlacement::end_of_step;
    ConjugateConvention convention = ConjugateConvention::unit_below_one;

    CoefficientSpec coefficients(double p) const;
};

struct EnsembleConfig {
    std::size_t n_paths = 1000;
    PathGrid grid{1.0, 4096};
    std::uint64_t master_seed = 1;
    Scenario scenario;
    //! Worker threads; results do not depend on it.
    unsigned threads = 1;
};

/// Raised when a study's precondition on the scenario is not met.
class PreconditionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct EstimateReport {
    std::string quantity;
    std::string point_name;
    std::vector<double> points;
    std::vector<double> estimate;
    std::vector<double> ci_upper;
    std::vector<double> bound;
    std::vector<bool> pass;
    std::size_t n_effective = 0;
    std::size_t flagged_paths = 0;
    //! Study-specific scalars, in insertion order.
    std::vector<std::pair<std::string, double>> summary;

    bool all_pass() const;
};

/// Fraction of flagged (overflowed) paths tolerated on a study.
inline constexpr double overflow_budget = 1e-4;

/// E|x0|^p: analytic for deterministic x0, empirical over the ensemble's
/// sampled initial values otherwise.
double initial_moment(EnsembleConfig const& cfg, double p);

/// Bound inputs for the scenario at moment order p (window h for the
/// continuity constants; h = 0 skips them).
BoundInputs make_bound_inputs(EnsembleConfig const& cfg, double p, double h = 0.0);

/// Amplitude C0* of the sine intensity C0 sin(t) at which the strong
/// condition lhs reaches 1, other inputs fixed (p <= 1).
double sine_intensity_threshold(EnsembleConfig const& cfg, double p);

/// Noise and initial value of one path, reproducible from (seed, index).
NoisePath ensemble_noise(EnsembleConfig const& cfg, std::size_t path_index);
double ensemble_initial_value(EnsembleConfig const& cfg, std::size_t path_index);

/// Geometric grid of `count` levels from lo to hi inclusive.
std::vector<double> geometric_levels(double lo, double hi, std::size_t count);

/// Exceedance fractions P(|conv(t_eval)| >= x) of the stochastic
/// convolution, with one-sided 99% Clopper-Pearson limits, against the tail
/// bound. Flagged paths count as exceedances.
EstimateReport empirical_tail(EnsembleConfig const& cfg,
                              std::vector<double> const& x_levels,
                              std::optional<double> t_eval = std::nullopt);

/// Empirical E|X(t)|^p with bootstrap 99% upper limits against the moment
/// bound.
EstimateReport empirical_moment(EnsembleConfig const& cfg,
                                double p,
                                std::vector<double> const& t_points,
                                std::size_t resamples = 1000);

/// sup_t of the empirical E|X(t+h) - X(t)|^p per window h, with bootstrap
/// limits at the maximising node and a decreasing-trend verdict.
EstimateReport continuity_modulus(EnsembleConfig const& cfg,
                                  double p,
                                  std::vector<double> const& h_levels,
                                  std::size_t resamples = 1000);

struct PicardPathResult {
    std::size_t path_index = 0;
    bool converged = false;
    bool flagged = false;
    std::size_t iterations = 0;
    double max_ratio = 0.0;
    double fixed_point_distance = 0.0;
    std::vector<double> history;
};

struct PicardStudyReport {
    double p = 0.0;
    std::string regime;  // "strong_condition" or "weighted_norm"
    double analytic_constant = 0.0;
    double gamma = 0.0;
    double slack = 0.05;
    double max_ratio = 0.0;
    double max_fixed_point_distance = 0.0;
    double fixed_point_tolerance = 1e-8;
    std::size_t n_paths = 0;
    std::size_t non_converged = 0;
    std::size_t flagged_paths = 0;
    std::vector<PicardPathResult> paths;

    bool pass() const;
};

/// Picard iteration per path from the constant initial path; measured
/// successive-distance ratios are compared to the analytic contraction
/// constant. Throws PreconditionError when the scenario has no contraction
/// guarantee.
PicardStudyReport picard_rate_study(EnsembleConfig const& cfg,
                                    double p,
                                    double tol,
                                    std::size_t max_iter,
                                    std::size_t n_paths);

}  // namespace stablemild
