#include "stablemild/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stablemild/random.hpp"

namespace stablemild {

double max_tanh_amplitude(double p)
{
    // amplitude * tanh is amplitude-Lipschitz and has range 2 amplitude;
    // min(2A, A d) <= d^{p/2} for all d >= 0 iff A <= 2^{p/2 - 1}.
    return std::pow(2.0, p / 2.0 - 1.0);
}

std::function<double(double)> make_intensity(IntensityPreset const& preset)
{
    switch (preset.kind)
    {
        case IntensityKind::constant:
            return [v = preset.value](double) { return v; };
        case IntensityKind::sine:
            return [c = preset.amplitude](double t) { return c * std::sin(t); };
        case IntensityKind::table: {
            auto knots = preset.table;
            if (knots.empty())
            {
                throw std::invalid_argument("intensity table must have at least one knot");
            }
            if (!std::is_sorted(knots.begin(), knots.end(), [](auto const& l, auto const& r) {
                    return l.first < r.first;
                }))
            {
                throw std::invalid_argument("intensity table knots must be sorted by time");
            }
            for (std::size_t i = 1; i < knots.size(); ++i)
            {
                if (!(knots[i].first > knots[i - 1].first))
                {
                    throw std::invalid_argument("intensity table knot times must be distinct");
                }
            }
            return [knots = std::move(knots)](double t) {
                if (t <= knots.front().first)
                {
                    return knots.front().second;
                }
                if (t >= knots.back().first)
                {
                    return knots.back().second;
                }
                auto upper = std::upper_bound(knots.begin(), knots.end(), t, [](double v, auto const& k) {
                    return v < k.first;
                });
                auto lower = upper - 1;
                double w = (t - lower->first) / (upper->first - lower->first);
                return (1.0 - w) * lower->second + w * upper->second;
            };
        }
    }
    throw std::invalid_argument("unknown intensity preset");
}

CoefficientSpec make_coefficients(DriftPreset const& drift,
                                  IntensityPreset const& intensity,
                                  ResponsePreset const& response,
                                  double p)
{
    if (!(p > 0.0))
    {
        throw std::invalid_argument("moment order p must be positive");
    }
    CoefficientSpec spec;
    spec.p = p;

    switch (drift.kind)
    {
        case DriftKind::zero:
            spec.drift = [](double, double) { return 0.0; };
            break;
        case DriftKind::affine: {
            double k = drift.slope;
            double m = drift.intercept;
            spec.drift = [k, m](double, double x) { return k * x + m; };
            spec.drift_lipschitz = std::pow(std::abs(k), p);
            double larger = std::max(std::pow(std::abs(k), p), std::pow(std::abs(m), p));
            spec.drift_growth = p <= 1.0 ? larger : std::pow(2.0, p - 1.0) * larger;
            break;
        }
        case DriftKind::clipped_linear: {
            if (!(drift.clip > 0.0))
            {
                throw std::invalid_argument("clipped_linear drift needs a positive clip level");
            }
            double k = drift.slope;
            double c = drift.clip;
            spec.drift = [k, c](double, double x) { return std::clamp(k * x, -c, c); };
            spec.drift_lipschitz = std::pow(std::abs(k), p);
            spec.drift_growth = std::pow(std::min(std::abs(k), c), p);
            break;
        }
    }

    spec.intensity = make_intensity(intensity);

    switch (response.kind)
    {
        case ResponseKind::constant:
            spec.response = [v = response.value](double) { return v; };
            spec.response_bound = std::abs(response.value);
            break;
        case ResponseKind::tanh: {
            double amp = response.amplitude;
            if (std::abs(amp) > max_tanh_amplitude(p) * (1.0 + 1e-12))
            {
                throw std::invalid_argument("tanh response amplitude " + std::to_string(amp)
                                            + " exceeds the Hoelder-certified limit "
                                            + std::to_string(max_tanh_amplitude(p)) + " for p = "
                                            + std::to_string(p));
            }
            spec.response = [amp](double x) { return amp * std::tanh(x); };
            spec.response_bound = std::abs(amp);
            break;
        }
    }
    return spec;
}

std::string CoefficientCheck::describe() const
{
    std::string out;
    auto add = [&out](bool ok, char const* what) {
        if (!ok)
        {
            out += out.empty() ? "" : ", ";
            out += what;
        }
    };
    add(lipschitz, "drift Lipschitz constant");
    add(growth, "drift growth constant");
    add(bound, "response bound");
    add(holder, "response Hoelder condition");
    return out.empty() ? "ok" : "violated: " + out;
}

CoefficientCheck spot_check(CoefficientSpec const& coeffs, RngStream& rng, std::size_t n_probes)
{
    CoefficientCheck check;
    double p = coeffs.p;
    constexpr double slack = 1e-9;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    auto probe = [&rng]() {
        double magnitude = std::pow(10.0, rng.uniform(-4.0, 4.0));
        return rng.uniform() < 0.5 ? -magnitude : magnitude;
    };
    for (std::size_t i = 0; i < n_probes; ++i)
    {
        double t = rng.uniform(0.0, 10.0);
        double y = probe();
        double z = rng.uniform() < 0.5 ? probe() : y + probe() * 1e-3;
        double dist = std::abs(y - z);

        double f_y = coeffs.drift(t, y);
        double f_z = coeffs.drift(t, z);
        // Differences of nearby large values carry cancellation error.
        double f_roundoff = 4.0 * eps * (std::abs(f_y) + std::abs(f_z));
        if (std::abs(f_y - f_z) > f_roundoff
            && std::pow(std::abs(f_y - f_z) - f_roundoff, p) > coeffs.drift_lipschitz * std::pow(dist, p) * (1 + slack))
        {
            check.lipschitz = false;
        }
        if (std::pow(std::abs(f_y), p) > coeffs.drift_growth * (1.0 + std::pow(std::abs(y), p)) * (1 + slack) + 1e-300)
        {
            check.growth = false;
        }
        double phi_y = coeffs.response(y);
        double phi_z = coeffs.response(z);
        if (std::abs(phi_y) > coeffs.response_bound * (1 + slack))
        {
            check.bound = false;
        }
        double phi_roundoff = 4.0 * eps * (std::abs(phi_y) + std::abs(phi_z));
        if (std::abs(phi_y - phi_z) - phi_roundoff > std::pow(dist, p / 2.0) * (1 + slack))
        {
            check.holder = false;
        }
    }
    check.probes = n_probes;
    return check;
}

}  // namespace stablemild
