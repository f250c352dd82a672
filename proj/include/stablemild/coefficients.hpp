#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace stablemild {

class RngStream;

/// Coefficients of dX = [-aX + F(t,X)] dt + g(t) phi(X) dZ together with the
/// constants certified for the moment order p:
///   |F(t,y) - F(t,z)|^p <= drift_lipschitz |y - z|^p
///   |F(t,y)|^p          <= drift_growth (1 + |y|^p)
///   |phi(y)|            <= response_bound
///   |phi(y) - phi(z)|   <= |y - z|^{p/2}
struct CoefficientSpec {
    std::function<double(double, double)> drift;
    std::function<double(double)> intensity;
    std::function<double(double)> response;
    double drift_lipschitz = 0.0;
    double drift_growth = 0.0;
    double response_bound = 0.0;
    double p = 1.0;
};

enum class DriftKind { zero, affine, clipped_linear };
enum class IntensityKind { constant, sine, table };
enum class ResponseKind { constant, tanh };

struct DriftPreset {
    DriftKind kind = DriftKind::zero;
    double slope = 0.0;
    double intercept = 0.0;  // affine only
    double clip = 1.0;       // clipped_linear only

    bool operator==(DriftPreset const&) const = default;
};

struct IntensityPreset {
    IntensityKind kind = IntensityKind::constant;
    double value = 1.0;      // constant
    double amplitude = 1.0;  // sine: amplitude * sin(t)
    //! (t, g) knots, piecewise linear with constant extrapolation.
    std::vector<std::pair<double, double>> table;

    bool operator==(IntensityPreset const&) const = default;
};

struct ResponsePreset {
    ResponseKind kind = ResponseKind::constant;
    double value = 1.0;      // constant
    double amplitude = 0.5;  // tanh: amplitude * tanh(x)

    bool operator==(ResponsePreset const&) const = default;
};

/// Largest tanh amplitude whose Hoelder constant for exponent p/2 is 1.
double max_tanh_amplitude(double p);

std::function<double(double)> make_intensity(IntensityPreset const& preset);

/// Builds the functions and certifies their constants for moment order p.
/// Throws std::invalid_argument when a preset cannot be certified.
CoefficientSpec make_coefficients(DriftPreset const& drift,
                                  IntensityPreset const& intensity,
                                  ResponsePreset const& response,
                                  double p);

struct CoefficientCheck {
    bool lipschitz = true;
    bool growth = true;
    bool bound = true;
    bool holder = true;
    std::size_t probes = 0;

    bool ok() const { return lipschitz && growth && bound && holder; }
    std::string describe() const;
};

/// Statistical spot-check of the certified constants on random probes
/// spread over many orders of magnitude.
CoefficientCheck spot_check(CoefficientSpec const& coeffs, RngStream& rng, std::size_t n_probes);

}  // namespace stablemild
