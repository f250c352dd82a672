#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "oracles.hpp"
#include "stablemild/levy_model.hpp"

using namespace stablemild;

namespace {
double rel(double x, double y)
{
    return std::abs(x - y) / std::max(std::abs(y), 1e-300);
}
}  // namespace

TEST_CASE("characteristics reject invalid parameters")
{
    CHECK_THROWS_AS(StableCharacteristics(2.5, 0.5, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StableCharacteristics(0.0, 0.5, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StableCharacteristics(2.0, 0.5, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StableCharacteristics(1.9999, 0.5, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StableCharacteristics(1.5, -0.1, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StableCharacteristics(1.5, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StableCharacteristics(1.0, 0.7, 0.3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StableCharacteristics(1.0, 0.5, 0.5, 0.2), std::invalid_argument);
    CHECK_NOTHROW(StableCharacteristics(1.0, 0.5, 0.5, 0.0));
}

TEST_CASE("strict drift convention")
{
    auto chars = StableCharacteristics::strict(1.5, 0.8, 0.2);
    CHECK(chars.b() == doctest::Approx(-(0.8 - 0.2) / 0.5));
    CHECK(StableCharacteristics::strict(0.7, 0.8, 0.2).b() == doctest::Approx(0.6 / 0.3));
    CHECK(StableCharacteristics::strict(1.0, 0.4, 0.4).b() == 0.0);
    CHECK(StableCharacteristics::symmetric(1.2, 0.3).is_symmetric());
}

TEST_CASE("levy density")
{
    CHECK(levy_density(StableCharacteristics(1.0, 1.0, 1.0, 0.0), 2.0) == doctest::Approx(0.25));
    CHECK(levy_density(StableCharacteristics(0.5, 1.0, 0.0, 0.0), -1.0) == 0.0);
    CHECK(levy_density(StableCharacteristics(1.5, 0.5, 0.5, 0.0), 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(levy_density(StableCharacteristics::symmetric(1.5, 0.5), 0.0), std::invalid_argument);
}

TEST_CASE("tail mass")
{
    CHECK(tail_mass(StableCharacteristics::symmetric(1.0, 0.5), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tail_mass(StableCharacteristics::symmetric(1.5, 0.5), std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(tail_mass(StableCharacteristics(0.5, 1.0, 1.0, 0.0), 4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(oracle::tail_mass(0.5, 1.0, 1.0, 4.0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(tail_mass(StableCharacteristics::symmetric(1.5, 0.5), 0.0), std::invalid_argument);
}

TEST_CASE("tail mass matches quadrature for every R >= 1")
{
    for (double alpha : {0.3, 0.5, 1.0, 1.5, 1.9})
    {
        double cp = 0.7;
        double cm = alpha == 1.0 ? 0.7 : 0.2;
        StableCharacteristics chars(alpha, cp, cm, 0.0);
        auto tb = compute_tail_bounds(chars);
        for (double R : {1.0, 1.7, 4.0, 25.0, 1e3})
        {
            double oracle_value = oracle::tail_mass(alpha, cp, cm, R);
            CHECK(rel(tail_mass(chars, R), oracle_value) < 1e-10);
            CHECK(rel(tail_mass(chars, R) * std::pow(R, alpha), tb.C1) < 1e-13);
        }
    }
}

TEST_CASE("small second moment")
{
    CHECK(small_second_moment(StableCharacteristics::symmetric(1.0, 0.5), 1.0) == doctest::Approx(1.0));
    CHECK(small_second_moment(StableCharacteristics::symmetric(1.5, 1.0), 2.0)
          == doctest::Approx(2.0 * std::sqrt(2.0) / 0.5).epsilon(1e-14));
    CHECK(small_second_moment(StableCharacteristics::symmetric(1.5, 1.0), 1e-12) < 1e-5);
    for (double alpha : {0.5, 1.0, 1.5, 1.9})
    {
        StableCharacteristics chars(alpha, 0.6, 0.6, 0.0);
        for (double R : {0.5, 1.0, 2.0, 10.0})
        {
            CHECK(rel(small_second_moment(chars, R), oracle::small_second_moment(alpha, 0.6, 0.6, R)) < 1e-8);
        }
    }
}

TEST_CASE("truncated drift")
{
    auto sym = StableCharacteristics(1.5, 0.5, 0.5, 0.3);
    CHECK(truncated_drift(sym, 7.0) == 0.3);
    CHECK(truncated_drift(StableCharacteristics(0.8, 0.9, 0.1, -0.2), 1.0) == -0.2);
    CHECK(truncated_drift(StableCharacteristics(0.5, 1.0, 0.0, 0.0), 4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rel(oracle::truncated_drift(0.5, 1.0, 0.0, 0.0, 4.0), 2.0) < 1e-10);
    CHECK_THROWS_AS(truncated_drift(sym, 0.5), std::invalid_argument);

    // Monotone in R when c+ > c-.
    for (double alpha : {0.5, 1.5})
    {
        StableCharacteristics chars(alpha, 0.9, 0.1, 0.0);
        double previous = truncated_drift(chars, 1.0);
        for (double R = 1.5; R < 100.0; R *= 1.5)
        {
            double value = truncated_drift(chars, R);
            CHECK(value > previous);
            CHECK(rel(value, oracle::truncated_drift(alpha, 0.9, 0.1, 0.0, R)) < 1e-9);
            previous = value;
        }
    }
}

TEST_CASE("annulus quantities agree with tail mass and quadrature")
{
    StableCharacteristics chars(1.3, 0.8, 0.3, 0.0);
    CHECK(rel(annulus_mass(chars, 0.5, 3.0), tail_mass(chars, 0.5) - tail_mass(chars, 3.0)) < 1e-13);
    double direct = integrate_against_measure(chars, [](double y) { return y; }, 0.5, 3.0);
    CHECK(rel(annulus_first_moment(chars, 0.5, 3.0), direct) < 1e-9);
    // alpha = 1 uses the logarithmic form; the symmetric weights cancel it.
    CHECK(annulus_first_moment(StableCharacteristics::symmetric(1.0, 0.4), 0.1, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("integrate_against_measure reproduces the closed forms")
{
    StableCharacteristics chars(1.5, 0.5, 0.5, 0.0);
    double inf = std::numeric_limits<double>::infinity();
    CHECK(rel(integrate_against_measure(chars, [](double) { return 1.0; }, 2.0, inf), tail_mass(chars, 2.0)) < 1e-9);
    CHECK(rel(integrate_against_measure(chars, [](double y) { return y * y; }, 0.0, 3.0),
              small_second_moment(chars, 3.0))
          < 1e-9);
}

TEST_CASE("moment condition holds iff p < alpha")
{
    CHECK(check_h_condition(StableCharacteristics::symmetric(1.5, 0.5), 1.0));
    CHECK_FALSE(check_h_condition(StableCharacteristics::symmetric(1.5, 0.5), 1.5));
    CHECK_FALSE(check_h_condition(StableCharacteristics::symmetric(1.9, 0.5), 2.0));
    CHECK(check_h_condition(StableCharacteristics::symmetric(0.5, 0.5), 0.49));
    CHECK_THROWS_AS(check_h_condition(StableCharacteristics::symmetric(1.5, 0.5), 0.0), std::invalid_argument);

    // Quadrature heuristic: the truncated p-moment stabilises for p < alpha
    // and keeps growing otherwise.
    StableCharacteristics chars = StableCharacteristics::symmetric(1.5, 0.5);
    auto truncated = [&](double p, double hi) {
        return integrate_against_measure(chars, [p](double y) { return std::pow(std::abs(y), p); }, 1.0, hi);
    };
    CHECK(truncated(1.0, 1e8) - truncated(1.0, 1e6) < 1e-2);
    CHECK(truncated(1.5, 1e8) - truncated(1.5, 1e6) > 1.0);
}

TEST_CASE("tail bound constants")
{
    auto cauchy = compute_tail_bounds(StableCharacteristics::symmetric(1.0, 0.5));
    CHECK(cauchy.beta == 1.0);
    CHECK(cauchy.C1 == doctest::Approx(1.0));
    CHECK(cauchy.C2 == doctest::Approx(1.0));
    CHECK(rel(cauchy.C1, oracle::tail_mass(1.0, 0.5, 0.5, 1.0)) < 1e-10);
    CHECK(rel(cauchy.C2, oracle::small_second_moment(1.0, 0.5, 0.5, 1.0)) < 1e-10);

    auto tb = compute_tail_bounds(StableCharacteristics::symmetric(1.5, 0.5));
    CHECK(tb.beta == 1.5);
    CHECK(tb.C1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(tb.C2 == doctest::Approx(2.0).epsilon(1e-15));

    auto scaled = compute_tail_bounds(StableCharacteristics::symmetric(1.5, 1.5));
    CHECK(scaled.C1 == doctest::Approx(3.0 * tb.C1));
    CHECK(scaled.C2 == doctest::Approx(3.0 * tb.C2));

    // Second inequality: the small-jump mass is bounded by C2 R^{2-beta}.
    for (double R : {1.0, 2.0, 8.0})
    {
        CHECK(small_second_moment(StableCharacteristics::symmetric(1.5, 0.5), R)
              <= tb.C2 * std::pow(R, 2.0 - tb.beta) * (1.0 + 1e-14));
    }
}

TEST_CASE("stable law parameters")
{
    auto cauchy = stable_law(StableCharacteristics::symmetric(1.0, 1.0 / std::numbers::pi));
    CHECK(cauchy.scale == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cauchy.skew == 0.0);
    CHECK(cauchy.location == 0.0);

    for (double alpha : {0.5, 0.9, 1.5, 1.9})
    {
        StableCharacteristics chars(alpha, 0.7, 0.3, 0.0);
        auto law = stable_law(chars);
        CHECK(rel(std::pow(law.scale, alpha), oracle::scale_power(alpha, 0.7, 0.3)) < 1e-9);
        CHECK(law.skew == doctest::Approx(0.4));
    }
    // Strict chars have zero location.
    CHECK(stable_law(StableCharacteristics::strict(1.5, 0.8, 0.2)).location == doctest::Approx(0.0));
    CHECK(stable_law(StableCharacteristics::strict(0.6, 0.8, 0.2)).location == doctest::Approx(0.0));
}
