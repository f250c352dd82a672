#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "stablemild/noise_sim.hpp"
#include "stablemild/stats.hpp"

using namespace stablemild;

namespace {

std::vector<double> terminal_values(StableCharacteristics const& chars, double T, std::size_t n,
                                    std::uint64_t seed)
{
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        out.push_back(simulate_exact_path(chars, PathGrid(T, 1), SeedSpec{seed, i}).terminal_value());
    }
    return out;
}

}  // namespace

TEST_CASE("grid geometry")
{
    PathGrid grid(2.0, 8);
    CHECK(grid.n_nodes() == 9);
    CHECK(grid.dt() == 0.25);
    CHECK(grid.time(8) == 2.0);
    CHECK(grid.time(3) == 0.75);
    CHECK(grid.step_containing(0.0) == 0);
    CHECK(grid.step_containing(0.25) == 0);
    CHECK(grid.step_containing(0.2500001) == 1);
    CHECK(grid.step_containing(2.0) == 7);
    CHECK_THROWS_AS(grid.step_containing(2.5), std::out_of_range);
    CHECK_THROWS_AS(PathGrid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(PathGrid(1.0, 0), std::invalid_argument);
}

TEST_CASE("rng streams are reproducible and distinct")
{
    RngStream a(SeedSpec{5, 3});
    RngStream b(SeedSpec{5, 3});
    RngStream c(SeedSpec{5, 4});
    RngStream d(SeedSpec{5, 3}, 1);
    std::uint64_t x = a.bits();
    CHECK(x == b.bits());
    CHECK(x != c.bits());
    CHECK(x != d.bits());

    RngStream u(SeedSpec{1, 0});
    double sum = 0.0;
    double sum_sq = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        double z = u.normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.01);

    double total = 0.0;
    for (int i = 0; i < 20000; ++i)
    {
        total += static_cast<double>(u.poisson(3.5));
    }
    CHECK(std::abs(total / 20000 - 3.5) < 0.05);
    CHECK(u.poisson(0.0) == 0);
    CHECK_THROWS_AS(u.poisson(-1.0), std::invalid_argument);
}

TEST_CASE("exact paths are deterministic per seed")
{
    auto chars = StableCharacteristics::symmetric(1.5, 0.5);
    PathGrid grid(1.0, 64);
    auto p1 = simulate_exact_path(chars, grid, SeedSpec{9, 2});
    auto p2 = simulate_exact_path(chars, grid, SeedSpec{9, 2});
    auto p3 = simulate_exact_path(chars, grid, SeedSpec{9, 3});
    CHECK(p1.increments == p2.increments);
    CHECK(p1.increments != p3.increments);
    auto z = p1.cumulative();
    REQUIRE(z.size() == 65);
    CHECK(z[0] == 0.0);
    CHECK(z.back() == doctest::Approx(p1.terminal_value()));
    CHECK(p1.big_jumps.empty());
}

TEST_CASE("Cauchy case matches the standard Cauchy law")
{
    double c = 1.0 / std::numbers::pi;
    auto chars = StableCharacteristics(1.0, c, c, 0.0);
    CHECK(stable_law(chars).scale == doctest::Approx(1.0).epsilon(1e-12));
    constexpr std::size_t n = 20000;
    auto samples = terminal_values(chars, 1.0, n, 11);
    double d = stats::ks_statistic(samples, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; });
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("symmetric stable marginal matches the Zolotarev CDF")
{
    for (double alpha : {0.7, 1.5})
    {
        auto chars = StableCharacteristics::symmetric(alpha, 0.5);
        double scale = stable_law(chars).scale;
        constexpr std::size_t n = 20000;
        auto samples = terminal_values(chars, 1.0, n, 12);
        double d = stats::ks_statistic(samples, [&](double x) { return oracle::symmetric_stable_cdf(alpha, x / scale); });
        CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("self-similarity at moderate sample size")
{
    for (double alpha : {0.9, 1.5})
    {
        auto chars = StableCharacteristics::strict(alpha, 0.6, 0.3);
        constexpr std::size_t n = 5000;
        auto z1 = terminal_values(chars, 1.0, n, 21);
        auto z2 = terminal_values(chars, 2.0, n, 22);
        for (double& v : z2)
        {
            v *= std::pow(2.0, -1.0 / alpha);
        }
        double d = stats::ks_statistic(z1, z2);
        CHECK(stats::ks_pvalue(d, n / 2.0) > 0.01);
    }
}

TEST_CASE("truncated route records big jumps at the Poisson rate")
{
    auto chars = StableCharacteristics::symmetric(1.5, 0.75);
    REQUIRE(tail_mass(chars, 1.0) == doctest::Approx(1.0));
    PathGrid grid(2.0, 32);
    TruncationOptions options;
    options.R = 1.0;
    options.epsilon = 0.05;
    constexpr std::size_t n = 20000;
    double count = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto path = simulate_truncated_path(chars, grid, options, SeedSpec{31, i});
        CHECK(path.route == NoiseRoute::truncated);
        CHECK(path.truncation_level == 1.0);
        for (auto const& jump : path.big_jumps)
        {
            CHECK(std::abs(jump.size) > 1.0);
            CHECK(jump.time > 0.0);
            CHECK(jump.time <= 2.0);
        }
        count += static_cast<double>(path.big_jumps.size());
    }
    // mean 2, standard error sqrt(2/n) = 0.01
    CHECK(std::abs(count / n - 2.0) < 0.05);
}

TEST_CASE("truncated route matches the exact law")
{
    auto chars = StableCharacteristics::symmetric(1.5, 0.5);
    TruncationOptions options;
    options.epsilon = 1e-2;
    constexpr std::size_t n = 5000;
    std::vector<double> truncated;
    for (std::size_t i = 0; i < n; ++i)
    {
        truncated.push_back(simulate_truncated_path(chars, PathGrid(1.0, 4), options, SeedSpec{41, i}).terminal_value());
    }
    auto exact = terminal_values(chars, 1.0, n, 42);
    CHECK(stats::ks_pvalue(stats::ks_statistic(truncated, exact), n / 2.0) > 0.01);
}

TEST_CASE("truncated route rejects bad options")
{
    auto chars = StableCharacteristics::symmetric(1.5, 0.5);
    PathGrid grid(1.0, 4);
    TruncationOptions options;
    options.R = 0.5;
    CHECK_THROWS_AS(simulate_truncated_path(chars, grid, options, {}), std::invalid_argument);
    options.R = 2.0;
    options.epsilon = 3.0;
    CHECK_THROWS_AS(simulate_truncated_path(chars, grid, options, {}), std::invalid_argument);
    options.epsilon = 1e-9;
    CHECK_THROWS_AS(simulate_truncated_path(chars, grid, options, {}), std::invalid_argument);
}

TEST_CASE("first big jump time is exponential")
{
    auto chars = StableCharacteristics::symmetric(1.5, 0.75);
    constexpr std::size_t n = 100000;
    double sum = 0.0;
    std::size_t survived = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double tau = first_big_jump_time(chars, 1.0, SeedSpec{51, i});
        sum += tau;
        survived += tau > 1.0 ? 1 : 0;
    }
    CHECK(std::abs(sum / n - 1.0) < 0.01);
    CHECK(std::abs(static_cast<double>(survived) / n - std::exp(-1.0)) < 0.005);
    CHECK(first_big_jump_time(chars, 1.0, SeedSpec{51, 7}) == first_big_jump_time(chars, 1.0, SeedSpec{51, 7}));
}

TEST_CASE("sampler input checks")
{
    auto chars = StableCharacteristics::symmetric(1.5, 0.5);
    RngStream rng(SeedSpec{1, 1});
    CHECK_THROWS_AS(sample_stable_increment(chars, 0.0, rng), std::invalid_argument);
    std::vector<double> out(3);
    CHECK_THROWS_AS(simulate_exact_increments(StableSampler(chars), PathGrid(1.0, 4), rng, out),
                    std::invalid_argument);
}

TEST_CASE("csv dumps")
{
    auto chars = StableCharacteristics::symmetric(1.5, 0.5);
    TruncationOptions options;
    options.epsilon = 0.1;
    std::uint64_t index = 0;
    while (simulate_truncated_path(chars, PathGrid(1.0, 4), options, SeedSpec{61, index}).big_jumps.empty())
    {
        ++index;
    }
    NoisePath path = simulate_truncated_path(chars, PathGrid(1.0, 4), options, SeedSpec{61, index});
    std::ostringstream z;
    write_path_csv(path, z);
    CHECK(z.str().rfind("t,Z\n0,0\n", 0) == 0);
    std::ostringstream jumps;
    write_jumps_csv(path, jumps);
    CHECK(jumps.str().rfind("time,size\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : jumps.str())
    {
        lines += ch == '\n' ? 1 : 0;
    }
    CHECK(lines == path.big_jumps.size() + 1);
}
