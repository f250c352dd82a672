#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "stablemild/coefficients.hpp"
#include "stablemild/random.hpp"

using namespace stablemild;

TEST_CASE("affine drift constants")
{
    DriftPreset drift{DriftKind::affine, -0.5, 0.25, 1.0};
    auto spec = make_coefficients(drift, {}, {}, 0.5);
    CHECK(spec.drift(0.3, 2.0) == doctest::Approx(-0.75));
    CHECK(spec.drift_lipschitz == doctest::Approx(std::sqrt(0.5)));
    CHECK(spec.drift_growth == doctest::Approx(std::sqrt(0.5)));

    auto spec2 = make_coefficients(drift, {}, {}, 2.0);
    CHECK(spec2.drift_lipschitz == doctest::Approx(0.25));
    CHECK(spec2.drift_growth == doctest::Approx(2.0 * 0.25));
}

TEST_CASE("zero drift and constant response")
{
    auto spec = make_coefficients({}, {}, {ResponseKind::constant, -2.0, 0.5}, 0.75);
    CHECK(spec.drift(1.0, 5.0) == 0.0);
    CHECK(spec.drift_lipschitz == 0.0);
    CHECK(spec.drift_growth == 0.0);
    CHECK(spec.response(3.0) == -2.0);
    CHECK(spec.response_bound == 2.0);
    CHECK(spec.intensity(0.7) == 1.0);
}

TEST_CASE("clipped drift")
{
    auto spec = make_coefficients({DriftKind::clipped_linear, 2.0, 0.0, 0.5}, {}, {}, 1.0);
    CHECK(spec.drift(0.0, 0.1) == doctest::Approx(0.2));
    CHECK(spec.drift(0.0, 10.0) == 0.5);
    CHECK(spec.drift(0.0, -10.0) == -0.5);
    CHECK(spec.drift_lipschitz == 2.0);
    CHECK(spec.drift_growth == 0.5);
    CHECK_THROWS_AS(make_coefficients({DriftKind::clipped_linear, 2.0, 0.0, 0.0}, {}, {}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("intensity presets")
{
    IntensityPreset sine;
    sine.kind = IntensityKind::sine;
    sine.amplitude = 0.3;
    CHECK(make_intensity(sine)(1.0) == doctest::Approx(0.3 * std::sin(1.0)));

    IntensityPreset table;
    table.kind = IntensityKind::table;
    table.table = {{0.0, 1.0}, {1.0, 3.0}, {2.0, 2.0}};
    auto g = make_intensity(table);
    CHECK(g(-1.0) == 1.0);
    CHECK(g(0.25) == doctest::Approx(1.5));
    CHECK(g(1.5) == doctest::Approx(2.5));
    CHECK(g(5.0) == 2.0);

    table.table = {{1.0, 0.0}, {0.5, 1.0}};
    CHECK_THROWS_AS(make_intensity(table), std::invalid_argument);
    table.table = {{1.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(make_intensity(table), std::invalid_argument);
    table.table.clear();
    CHECK_THROWS_AS(make_intensity(table), std::invalid_argument);
}

TEST_CASE("tanh amplitude limit keeps the Hoelder constant at one")
{
    for (double p : {0.25, 0.5, 0.75, 1.0, 1.4})
    {
        double amp = max_tanh_amplitude(p);
        double worst = 0.0;
        for (int i = -400; i <= 400; ++i)
        {
            for (int j = -400; j < i; ++j)
            {
                double y = i * 0.02;
                double z = j * 0.02;
                double ratio = amp * std::abs(std::tanh(y) - std::tanh(z)) / std::pow(y - z, p / 2.0);
                worst = std::max(worst, ratio);
            }
        }
        CHECK(worst <= 1.0);
        CHECK_NOTHROW(make_coefficients({}, {}, {ResponseKind::tanh, 1.0, amp}, p));
        CHECK_THROWS_AS(make_coefficients({}, {}, {ResponseKind::tanh, 1.0, 1.01 * amp}, p),
                        std::invalid_argument);
    }
}

TEST_CASE("spot check accepts certified presets")
{
    RngStream rng(SeedSpec{3, 0});
    for (double p : {0.5, 0.75, 1.0, 1.5})
    {
        IntensityPreset sine;
        sine.kind = IntensityKind::sine;
        auto specs = {
            make_coefficients({DriftKind::affine, -0.05, 0.0, 1.0}, sine, {ResponseKind::tanh, 1.0, max_tanh_amplitude(p)}, p),
            make_coefficients({DriftKind::affine, 0.3, -0.2, 1.0}, {}, {}, p),
            make_coefficients({DriftKind::clipped_linear, -1.5, 0.0, 0.4}, {}, {ResponseKind::constant, 0.7, 0.5}, p),
        };
        for (auto const& spec : specs)
        {
            auto check = spot_check(spec, rng, 20000);
            CHECK(check.ok());
            CHECK(check.probes == 20000);
            CHECK(check.describe() == "ok");
        }
    }
}

TEST_CASE("spot check catches understated constants")
{
    RngStream rng(SeedSpec{4, 0});
    auto spec = make_coefficients({DriftKind::affine, 0.5, 0.5, 1.0}, {}, {ResponseKind::tanh, 1.0, 0.5}, 1.0);
    spec.drift_lipschitz *= 0.5;
    spec.drift_growth *= 0.5;
    spec.response_bound *= 0.5;
    auto check = spot_check(spec, rng, 5000);
    CHECK_FALSE(check.lipschitz);
    CHECK_FALSE(check.growth);
    CHECK_FALSE(check.bound);
    CHECK(check.holder);
    CHECK(check.describe() == "violated: drift Lipschitz constant, drift growth constant, response bound");

    spec.response = [](double x) { return 2.0 * std::tanh(x); };
    spec.response_bound = 2.0;
    CHECK_FALSE(spot_check(spec, rng, 5000).holder);
}

TEST_CASE("order must be positive")
{
    CHECK_THROWS_AS(make_coefficients({}, {}, {}, 0.0), std::invalid_argument);
}
