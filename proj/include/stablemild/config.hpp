#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablemild/bounds.hpp"
#include "stablemild/coefficients.hpp"
#include "stablemild/montecarlo.hpp"

namespace stablemild {

/// A configuration problem tied to a line (0 when not line-specific) and a
/// "section.key" field name.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::size_t line, std::string field, std::string const& message);
    std::size_t line() const { return line_; }
    std::string const& field() const { return field_; }

  private:
    std::size_t line_;
    std::string field_;
};

/// One scenario file. Plain data; `build_ensemble` turns it into the runtime
/// configuration.
struct ScenarioConfig {
    // [process]
    double alpha = 1.5;
    double c_plus = 0.5;
    double c_minus = 0.5;
    double b = 0.0;
    // [semigroup]
    double a = 1.0;
    // [coefficients]
    DriftPreset drift;
    IntensityPreset intensity;
    //! Sine amplitude chosen as half the strong-condition threshold.
    bool intensity_auto = false;
    ResponsePreset response;
    ConstantOverrides overrides;
    // [simulation]
    double T = 1.0;
    std::size_t n_steps = 4096;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    NoiseRoute route = NoiseRoute::exact;
    double R = 1.0;
    double epsilon = 1e-3;
    SmallJumpPolicy small_jump_policy = SmallJumpPolicy::gaussian;
    JumpPlacement jump_placement = JumpPlacement::end_of_step;
    double x0 = 1.0;
    double x0_spread = 0.0;
    // [analysis]
    double p = 0.75;
    //! Empty means x_level_count geometric levels from eta to 50 eta.
    std::vector<double> x_levels;
    std::size_t x_level_count = 12;
    //! Empty means t_count evenly spaced points in (0, T].
    std::vector<double> t_points;
    std::size_t t_count = 16;
    std::vector<double> h_levels{0.2, 0.1, 0.05, 0.025};
    double tol = 1e-10;
    std::size_t max_iter = 500;
    std::size_t picard_paths = 100;
    ConjugateConvention convention = ConjugateConvention::unit_below_one;

    bool operator==(ScenarioConfig const&) const = default;
};

/// Parses the sectioned key = value format; '#' starts a comment. Unknown
/// sections or keys, malformed values and failed cross-field checks raise
/// ConfigError naming the line and field.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(std::string const& path);

/// Range and cross-field checks (also run by parse_config).
void validate_config(ScenarioConfig const& cfg);

/// Canonical text form; parse_config(print_config(c)) == c.
std::string print_config(ScenarioConfig const& cfg);

/// Runtime ensemble, with an automatic sine amplitude resolved.
EnsembleConfig build_ensemble(ScenarioConfig const& cfg, unsigned threads = 1);

std::vector<double> resolve_t_points(ScenarioConfig const& cfg);
std::vector<double> resolve_x_levels(ScenarioConfig const& cfg, double eta_value);

}  // namespace stablemild
