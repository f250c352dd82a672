#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "stablemild/bounds.hpp"
#include "stablemild/convolution.hpp"
#include "stablemild/noise_sim.hpp"

using namespace stablemild;

namespace {

CoefficientSpec coefficients(DriftPreset drift, double g, ResponsePreset response, double p = 0.5)
{
    IntensityPreset intensity;
    intensity.value = g;
    return make_coefficients(drift, intensity, response, p);
}

NoisePath quiet_noise(PathGrid grid)
{
    return NoisePath{grid, std::vector<double>(grid.n_steps(), 0.0), {}, NoiseRoute::exact, std::nullopt};
}

NoisePath sample_noise(std::uint64_t index, std::size_t n = 256)
{
    return simulate_exact_path(StableCharacteristics::symmetric(1.5, 0.5), PathGrid(1.0, n), SeedSpec{77, index});
}

}  // namespace

TEST_CASE("semigroup laws")
{
    SemigroupParams sg(0.7);
    CHECK(sg(0.0) == 1.0);
    CHECK(sg(0.3 + 1.1) == doctest::Approx(sg(0.3) * sg(1.1)).epsilon(1e-15));
    CHECK(sg(2.0) <= SemigroupParams::growth() * std::exp(-0.7 * 2.0) * (1 + 1e-15));
    CHECK_THROWS_AS(sg(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(SemigroupParams(0.0), std::invalid_argument);
    CHECK_THROWS_AS(SemigroupParams(-1.0), std::invalid_argument);
}

TEST_CASE("pure decay without drift or noise")
{
    PathGrid grid(2.0, 1000);
    auto coeffs = coefficients({}, 0.0, {});
    auto x = euler_solve(3.0, coeffs, SemigroupParams(1.3), quiet_noise(grid));
    for (std::size_t k = 0; k <= grid.n_steps(); k += 50)
    {
        CHECK(x.values[k] == doctest::Approx(3.0 * std::exp(-1.3 * grid.time(k))).epsilon(1e-12));
    }
}

TEST_CASE("constant drift integrates exactly")
{
    PathGrid grid(1.0, 10000);
    auto coeffs = coefficients({DriftKind::affine, 0.0, 1.0, 1.0}, 0.0, {});
    auto x = euler_solve(0.0, coeffs, SemigroupParams(1.0), quiet_noise(grid));
    CHECK(std::abs(x.values.back() - 0.632121) < 1e-3);
    CHECK(x.values.back() == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-12));
}

TEST_CASE("euler output is a fixed point of the operator")
{
    auto coeffs = coefficients({DriftKind::affine, -0.3, 0.1, 1.0}, 0.8, {ResponseKind::tanh, 1.0, 0.5});
    SemigroupParams sg(1.0);
    for (std::uint64_t i = 0; i < 5; ++i)
    {
        auto noise = sample_noise(i);
        auto x = euler_solve(1.0, coeffs, sg, noise);
        auto y = gamma_apply(x, 1.0, coeffs, sg, noise);
        CHECK(x.values == y.values);
    }

    TruncationOptions truncation;
    truncation.epsilon = 0.05;
    SolveOptions split;
    split.placement = JumpPlacement::split;
    std::size_t with_jumps = 0;
    for (std::uint64_t i = 0; i < 20; ++i)
    {
        auto noise = simulate_truncated_path(StableCharacteristics::symmetric(1.5, 0.5), PathGrid(1.0, 128), truncation,
                                             SeedSpec{78, i});
        with_jumps += noise.big_jumps.empty() ? 0 : 1;
        auto x = euler_solve(0.5, coeffs, sg, noise, split);
        CHECK(gamma_apply(x, 0.5, coeffs, sg, noise, split).values == x.values);
    }
    CHECK(with_jumps > 5);
}

TEST_CASE("operator needs matching grids")
{
    auto coeffs = coefficients({}, 1.0, {});
    auto x = euler_solve(1.0, coeffs, SemigroupParams(1.0), sample_noise(0, 64));
    CHECK_THROWS_AS(gamma_apply(x, 1.0, coeffs, SemigroupParams(1.0), sample_noise(0, 32)), std::invalid_argument);
}

TEST_CASE("picard iteration reaches the euler solution")
{
    auto coeffs = coefficients({DriftKind::affine, -0.3, 0.1, 1.0}, 0.8, {ResponseKind::tanh, 1.0, 0.5});
    SemigroupParams sg(1.0);
    PicardOptions options;
    options.p = 0.5;
    for (std::uint64_t i = 0; i < 5; ++i)
    {
        auto noise = sample_noise(i);
        auto result = picard_solve(1.0, coeffs, sg, noise, 1e-12, 500, options);
        auto x = euler_solve(1.0, coeffs, sg, noise);
        CHECK(metric_dp(result.path, x, 0.5) < 1e-8);
        CHECK(result.history.back() < 1e-12);
    }
}

TEST_CASE("input-independent operator converges in two steps")
{
    auto coeffs = coefficients({}, 1.0, {ResponseKind::constant, 0.5, 0.5});
    PicardOptions options;
    options.p = 0.75;
    auto result = picard_solve(2.0, coeffs, SemigroupParams(1.0), sample_noise(3), 1e-10, 10, options);
    CHECK(result.history.size() <= 2);
    CHECK(result.history.back() == 0.0);
}

TEST_CASE("picard failure carries the history")
{
    auto coeffs = coefficients({DriftKind::affine, -0.3, 0.1, 1.0}, 0.8, {ResponseKind::tanh, 1.0, 0.5});
    PicardOptions options;
    try
    {
        picard_solve(1.0, coeffs, SemigroupParams(1.0), sample_noise(1), 1e-12, 2, options);
        FAIL("expected PicardNotConverged");
    }
    catch (PicardNotConverged const& e)
    {
        CHECK(e.history().size() == 2);
    }
    CHECK_THROWS_AS(picard_solve(1.0, coeffs, SemigroupParams(1.0), sample_noise(1), 0.0, 2, options),
                    std::invalid_argument);
}

TEST_CASE("weighted sup distance")
{
    auto coeffs = coefficients({DriftKind::affine, -0.3, 0.0, 1.0}, 1.0, {ResponseKind::tanh, 1.0, 0.5}, 1.0);
    PicardOptions options;
    options.metric = PicardMetric::weighted_sup;
    options.gamma = 3.0;
    auto noise = sample_noise(2);
    auto result = picard_solve(1.0, coeffs, SemigroupParams(1.0), noise, 1e-13, 500, options);
    auto x = euler_solve(1.0, coeffs, SemigroupParams(1.0), noise);
    double worst = 0.0;
    for (std::size_t k = 0; k < x.values.size(); ++k)
    {
        worst = std::max(worst, std::abs(x.values[k] - result.path.values[k]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("a single big jump propagates through the semigroup")
{
    PathGrid grid(1.0, 10);
    NoisePath noise = quiet_noise(grid);
    noise.route = NoiseRoute::truncated;
    noise.truncation_level = 1.0;
    noise.big_jumps.push_back({0.55, 2.0});
    noise.increments[grid.step_containing(0.55)] += 2.0;
    auto coeffs = coefficients({}, 1.0, {});
    SemigroupParams sg(1.0);

    SolveOptions split;
    split.placement = JumpPlacement::split;
    auto x = euler_solve(0.0, coeffs, sg, noise, split);
    CHECK(x.values.back() == doctest::Approx(2.0 * std::exp(-0.45)).epsilon(1e-14));
    CHECK(x.values[5] == 0.0);

    auto y = euler_solve(0.0, coeffs, sg, noise);
    CHECK(y.values.back() == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("convolution component is tracked")
{
    SolveOptions options;
    options.track_convolution = true;
    auto coeffs = coefficients({}, 0.6, {});
    auto noise = sample_noise(4);
    auto x = euler_solve(0.0, coeffs, SemigroupParams(1.0), noise, options);
    REQUIRE(x.convolution.size() == x.values.size());
    for (std::size_t k = 0; k < x.values.size(); ++k)
    {
        CHECK(x.convolution[k] == doctest::Approx(x.values[k]).epsilon(1e-12));
    }
    CHECK(euler_solve(0.0, coeffs, SemigroupParams(1.0), noise).convolution.empty());
}

TEST_CASE("overflow is reported with its step")
{
    PathGrid grid(1.0, 8);
    NoisePath noise = quiet_noise(grid);
    noise.increments[3] = 1e200;
    noise.increments[4] = 1e200;
    auto coeffs = coefficients({DriftKind::affine, 1e150, 0.0, 1.0}, 1.0, {}, 1.0);
    SolveOptions options;
    options.overflow_limit = 1e250;
    try
    {
        euler_solve(0.0, coeffs, SemigroupParams(1.0), noise, options);
        FAIL("expected StateOverflow");
    }
    catch (StateOverflow const& e)
    {
        CHECK(e.step() == 4);
    }
}

TEST_CASE("eta for constant intensity")
{
    CHECK(eta(2.0, 1.0, [](double) { return 1.0; }) == doctest::Approx(0.65752).epsilon(1e-5));
    for (double a : {0.5, 1.0, 3.0})
    {
        for (double T : {0.5, 1.0, 4.0})
        {
            double value = eta(a, T, [](double) { return 1.7; });
            CHECK(std::abs(value - oracle::eta_constant(a, T, 1.7)) <= 1e-8 * oracle::eta_constant(a, T, 1.7));
        }
    }
    CHECK_THROWS_AS(eta(0.0, 1.0, [](double) { return 1.0; }), std::invalid_argument);
    CHECK_THROWS_AS(eta(1.0, 1.0, [](double) { return std::nan(""); }), std::domain_error);
}

TEST_CASE("eta for sine intensity")
{
    for (double a : {0.5, 1.0, 2.0})
    {
        for (double T : {1.0, 3.0, 7.5})
        {
            double value = eta(a, T, [](double t) { return 0.4 * std::sin(t); });
            double expected = oracle::eta_sine(a, T, 0.4);
            CHECK(std::abs(value - expected) <= 1e-8 * expected);
        }
    }
}

TEST_CASE("eta over a window")
{
    auto one = [](double) { return 1.0; };
    CHECK(eta_window(1.0, 1.0, one, 0.1) == doctest::Approx(0.308484).epsilon(1e-6));
    CHECK(eta_window(1.0, 1.0, one, 0.1) == doctest::Approx(std::sqrt(-std::expm1(-0.1))).epsilon(1e-12));
    // Window energy never exceeds the full energy on [0, t + h].
    auto g = [](double t) { return std::sin(t); };
    for (double h : {0.2, 0.1, 0.05, 0.025})
    {
        CHECK(eta_window(1.0, 1.0, g, h) <= eta(1.0, 1.0 + h, g) * (1 + 1e-12));
    }
    CHECK(eta_window(1.0, 1.0, g, 0.025) < eta_window(1.0, 1.0, g, 0.05));
    CHECK_THROWS_AS(eta_window(1.0, 1.0, one, 0.0), std::invalid_argument);
}
