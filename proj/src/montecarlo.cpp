#include "stablemild/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "stablemild/random.hpp"
#include "stablemild/stats.hpp"

namespace stablemild {

namespace {

constexpr std::size_t chunk_size = 256;
constexpr double confidence = 0.99;
constexpr std::uint32_t x0_substream = 3;

// Runs fn(begin, end) over fixed chunks of [0, n_items) on a small pool.
// Chunk boundaries never depend on the thread count, and results come back
// in chunk order, so any reduction over them is deterministic.
template <class Result, class Fn>
std::vector<Result> run_chunks(std::size_t n_items, unsigned threads, Fn const& fn)
{
    std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    std::vector<Result> results(n_chunks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;)
        {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks)
            {
                return;
            }
            try
            {
                std::size_t begin = c * chunk_size;
                results[c] = fn(begin, std::min(n_items, begin + chunk_size));
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
                next.store(n_chunks);
                return;
            }
        }
    };

    std::size_t n_threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n_chunks, 1));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_threads; ++i)
    {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool)
    {
        t.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
    return results;
}

void validate(EnsembleConfig const& cfg)
{
    if (cfg.n_paths < 2)
    {
        throw std::invalid_argument("ensemble needs at least 2 paths");
    }
    if (!std::isfinite(cfg.scenario.x0) || !(cfg.scenario.x0_spread >= 0.0))
    {
        throw std::invalid_argument("initial value must be finite with a non-negative spread");
    }
}

std::size_t node_of(PathGrid const& grid, double t, char const* what)
{
    if (!(t >= 0.0 && t <= grid.t_end()))
    {
        throw std::invalid_argument(std::string(what) + " must lie in [0, T]");
    }
    return static_cast<std::size_t>(std::llround(t / grid.dt()));
}

// Euler path of one ensemble member; empty when the state overflowed.
std::optional<SolutionPath> solve_member(EnsembleConfig const& cfg,
                                         CoefficientSpec const& coeffs,
                                         std::size_t index,
                                         bool track_convolution)
{
    NoisePath noise = ensemble_noise(cfg, index);
    SolveOptions options;
    options.placement = cfg.scenario.placement;
    options.track_convolution = track_convolution;
    try
    {
        return euler_solve(ensemble_initial_value(cfg, index), coeffs, cfg.scenario.semigroup, noise,
                           options);
    }
    catch (StateOverflow const&)
    {
        return std::nullopt;
    }
}

std::vector<double> column_means(std::vector<std::vector<double>> const& columns)
{
    std::vector<double> out;
    out.reserve(columns.size());
    for (auto const& column : columns)
    {
        out.push_back(stats::mean(column));
    }
    return out;
}

}  // namespace

CoefficientSpec Scenario::coefficients(double p) const
{
    CoefficientSpec spec = make_coefficients(drift, intensity, response, p);
    auto apply = [](std::optional<double> const& value, double& target, char const* name) {
        if (!value)
        {
            return;
        }
        if (!(*value >= target) || !std::isfinite(*value))
        {
            throw std::invalid_argument(std::string(name) + " override " + std::to_string(*value)
                                        + " is below the certified value "
                                        + std::to_string(target));
        }
        target = *value;
    };
    apply(overrides.L_F, spec.drift_lipschitz, "L_F");
    apply(overrides.C, spec.drift_growth, "C");
    apply(overrides.phi_inf, spec.response_bound, "phi_inf");
    return spec;
}

bool EstimateReport::all_pass() const
{
    return !pass.empty() && std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

bool PicardStudyReport::pass() const
{
    return n_paths > 0 && non_converged == 0 && flagged_paths == 0
           && max_ratio <= analytic_constant + slack
           && max_fixed_point_distance < fixed_point_tolerance;
}

NoisePath ensemble_noise(EnsembleConfig const& cfg, std::size_t path_index)
{
    SeedSpec seed{cfg.master_seed, path_index};
    if (cfg.scenario.route == NoiseRoute::exact)
    {
        return simulate_exact_path(cfg.scenario.chars, cfg.grid, seed);
    }
    return simulate_truncated_path(cfg.scenario.chars, cfg.grid, cfg.scenario.truncation, seed);
}

double ensemble_initial_value(EnsembleConfig const& cfg, std::size_t path_index)
{
    double spread = cfg.scenario.x0_spread;
    if (spread == 0.0)
    {
        return cfg.scenario.x0;
    }
    RngStream rng(SeedSpec{cfg.master_seed, path_index}, x0_substream);
    return rng.uniform(cfg.scenario.x0 - spread, cfg.scenario.x0 + spread);
}

double initial_moment(EnsembleConfig const& cfg, double p)
{
    if (cfg.scenario.x0_spread == 0.0)
    {
        return std::pow(std::abs(cfg.scenario.x0), p);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.n_paths; ++i)
    {
        total += std::pow(std::abs(ensemble_initial_value(cfg, i)), p);
    }
    return total / static_cast<double>(cfg.n_paths);
}

BoundInputs make_bound_inputs(EnsembleConfig const& cfg, double p, double h)
{
    Scenario const& s = cfg.scenario;
    CoefficientSpec coeffs = s.coefficients(p);
    LevyTailBounds tails = compute_tail_bounds(s.chars);
    BoundInputs in;
    in.a = s.semigroup.decay();
    in.b = s.chars.b();
    in.phi_inf = coeffs.response_bound;
    in.T = cfg.grid.t_end();
    in.h = h;
    in.beta = tails.beta;
    in.p = p;
    in.C1 = tails.C1;
    in.C2 = tails.C2;
    in.L_F = coeffs.drift_lipschitz;
    in.C = coeffs.drift_growth;
    in.eta = eta(in.a, in.T, coeffs.intensity);
    if (h > 0.0)
    {
        in.eta_window = eta_window(in.a, in.T, coeffs.intensity, h);
    }
    in.x0_moment = initial_moment(cfg, p);
    in.convention = s.convention;
    return in;
}

double sine_intensity_threshold(EnsembleConfig const& cfg, double p)
{
    if (!(p > 0.0 && p <= 1.0))
    {
        throw PreconditionError("the strong condition threshold applies to p in (0, 1]");
    }
    EnsembleConfig unit = cfg;
    unit.scenario.intensity = IntensityPreset{IntensityKind::sine, 1.0, 1.0, {}};
    BoundInputs base = make_bound_inputs(unit, p);
    double eta_unit = base.eta;
    // eta is linear in the amplitude of g.
    auto lhs = [&](double amplitude) {
        BoundInputs in = base;
        in.eta = amplitude * eta_unit;
        return check_strong_condition(in).lhs;
    };
    try
    {
        return strong_condition_threshold(lhs);
    }
    catch (std::invalid_argument const& e)
    {
        throw PreconditionError(e.what());
    }
}

std::vector<double> geometric_levels(double lo, double hi, std::size_t count)
{
    if (!(lo > 0.0) || !(hi >= lo) || count < 2)
    {
        throw std::invalid_argument("geometric levels need 0 < lo <= hi and at least 2 levels");
    }
    std::vector<double> out(count);
    double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
    {
        out[i] = lo * std::exp(ratio * static_cast<double>(i));
    }
    out.back() = hi;
    return out;
}

EstimateReport empirical_tail(EnsembleConfig const& cfg,
                              std::vector<double> const& x_levels,
                              std::optional<double> t_eval)
{
    validate(cfg);
    if (x_levels.empty())
    {
        throw std::invalid_argument("empirical_tail: no x levels");
    }
    // The tail bound does not involve p; certify coefficients at p = beta/2.
    double p_cert = 0.5 * cfg.scenario.chars.alpha();
    BoundInputs in = make_bound_inputs(cfg, p_cert);
    for (double x : x_levels)
    {
        if (!(x >= in.eta) || !std::isfinite(x))
        {
            throw PreconditionError("empirical_tail: x level " + std::to_string(x)
                                    + " is below eta = " + std::to_string(in.eta));
        }
    }
    std::size_t node = node_of(cfg.grid, t_eval.value_or(cfg.grid.t_end()), "tail evaluation time");
    CoefficientSpec coeffs = cfg.scenario.coefficients(p_cert);

    struct Chunk {
        std::vector<std::size_t> exceed;
        std::size_t flagged = 0;
    };
    auto chunks = run_chunks<Chunk>(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
        Chunk c{std::vector<std::size_t>(x_levels.size(), 0), 0};
        for (std::size_t i = begin; i < end; ++i)
        {
            auto path = solve_member(cfg, coeffs, i, true);
            if (!path)
            {
                ++c.flagged;
                for (auto& e : c.exceed)
                {
                    ++e;
                }
                continue;
            }
            double value = std::abs(path->convolution[node]);
            for (std::size_t j = 0; j < x_levels.size(); ++j)
            {
                c.exceed[j] += value >= x_levels[j] ? 1 : 0;
            }
        }
        return c;
    });

    std::vector<std::size_t> exceed(x_levels.size(), 0);
    std::size_t flagged = 0;
    for (auto const& c : chunks)
    {
        for (std::size_t j = 0; j < exceed.size(); ++j)
        {
            exceed[j] += c.exceed[j];
        }
        flagged += c.flagged;
    }

    EstimateReport report;
    report.quantity = "tail";
    report.point_name = "x";
    report.points = x_levels;
    report.n_effective = cfg.n_paths;
    report.flagged_paths = flagged;
    for (std::size_t j = 0; j < x_levels.size(); ++j)
    {
        double estimate = static_cast<double>(exceed[j]) / static_cast<double>(cfg.n_paths);
        double upper = stats::clopper_pearson_upper(exceed[j], cfg.n_paths, confidence);
        double bound = tail_bound(in, x_levels[j]);
        report.estimate.push_back(estimate);
        report.ci_upper.push_back(upper);
        report.bound.push_back(bound);
        report.pass.push_back(upper <= bound);
    }
    report.summary = {{"t", cfg.grid.time(node)}, {"eta", in.eta}, {"K_nu_T", k_nu(in, in.T)}};
    return report;
}

EstimateReport empirical_moment(EnsembleConfig const& cfg,
                                double p,
                                std::vector<double> const& t_points,
                                std::size_t resamples)
{
    validate(cfg);
    if (t_points.empty())
    {
        throw std::invalid_argument("empirical_moment: no time points");
    }
    if (!(p > 0.0 && p < cfg.scenario.chars.alpha()))
    {
        throw PreconditionError("empirical_moment: p must lie in (0, alpha)");
    }
    BoundInputs in = make_bound_inputs(cfg, p);
    double bound = moment_bound(in);
    CoefficientSpec coeffs = cfg.scenario.coefficients(p);
    std::vector<std::size_t> nodes;
    for (double t : t_points)
    {
        nodes.push_back(node_of(cfg.grid, t, "moment time point"));
    }

    struct Chunk {
        std::vector<double> rows;  // one row of |X(t)|^p per surviving path
        std::size_t flagged = 0;
    };
    auto chunks = run_chunks<Chunk>(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
        Chunk c;
        for (std::size_t i = begin; i < end; ++i)
        {
            auto path = solve_member(cfg, coeffs, i, false);
            if (!path)
            {
                ++c.flagged;
                continue;
            }
            for (std::size_t node : nodes)
            {
                c.rows.push_back(std::pow(std::abs(path->values[node]), p));
            }
        }
        return c;
    });

    std::vector<std::vector<double>> columns(nodes.size());
    std::size_t flagged = 0;
    for (auto const& c : chunks)
    {
        for (std::size_t r = 0; r < c.rows.size(); ++r)
        {
            columns[r % nodes.size()].push_back(c.rows[r]);
        }
        flagged += c.flagged;
    }
    if (columns.front().size() < 2)
    {
        throw std::runtime_error("empirical_moment: fewer than 2 paths survived");
    }

    EstimateReport report;
    report.quantity = "moment";
    report.point_name = "t";
    report.n_effective = columns.front().size();
    report.flagged_paths = flagged;
    report.estimate = column_means(columns);
    report.ci_upper =
        stats::bootstrap_mean_upper(columns, resamples, confidence, SeedSpec{cfg.master_seed, 0});
    for (std::size_t j = 0; j < nodes.size(); ++j)
    {
        report.points.push_back(cfg.grid.time(nodes[j]));
        report.bound.push_back(bound);
        report.pass.push_back(report.ci_upper[j] <= bound);
    }
    report.summary = {{"p", p}, {"eta", in.eta}, {"x0_moment", in.x0_moment}};
    return report;
}

EstimateReport continuity_modulus(EnsembleConfig const& cfg,
                                  double p,
                                  std::vector<double> const& h_levels,
                                  std::size_t resamples)
{
    validate(cfg);
    if (h_levels.size() < 2)
    {
        throw std::invalid_argument("continuity_modulus: need at least 2 window sizes");
    }
    if (!(p > 0.0 && p < cfg.scenario.chars.alpha()))
    {
        throw PreconditionError("continuity_modulus: p must lie in (0, alpha)");
    }
    PathGrid const& grid = cfg.grid;
    std::vector<std::size_t> lags;
    for (std::size_t i = 0; i < h_levels.size(); ++i)
    {
        double h = h_levels[i];
        if (!(h > 0.0) || (i > 0 && !(h < h_levels[i - 1])))
        {
            throw std::invalid_argument("continuity_modulus: windows must be positive and decreasing");
        }
        double steps = std::round(h / grid.dt());
        if (steps < 2.0)
        {
            throw std::invalid_argument("continuity_modulus: window " + std::to_string(h)
                                        + " is below two grid steps");
        }
        if (steps > static_cast<double>(grid.n_steps()))
        {
            throw std::invalid_argument("continuity_modulus: window exceeds the horizon");
        }
        lags.push_back(static_cast<std::size_t>(steps));
    }
    CoefficientSpec coeffs = cfg.scenario.coefficients(p);
    std::size_t nodes = grid.n_nodes();

    // Pass 1: per-node sums of |X(t+h) - X(t)|^p for every window.
    struct Sums {
        std::vector<double> sums;
        std::size_t used = 0;
        std::size_t flagged = 0;
    };
    auto first = run_chunks<Sums>(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
        Sums c{std::vector<double>(lags.size() * nodes, 0.0), 0, 0};
        for (std::size_t i = begin; i < end; ++i)
        {
            auto path = solve_member(cfg, coeffs, i, false);
            if (!path)
            {
                ++c.flagged;
                continue;
            }
            ++c.used;
            auto const& x = path->values;
            for (std::size_t j = 0; j < lags.size(); ++j)
            {
                double* row = c.sums.data() + j * nodes;
                for (std::size_t k = 0; k + lags[j] < nodes; ++k)
                {
                    row[k] += std::pow(std::abs(x[k + lags[j]] - x[k]), p);
                }
            }
        }
        return c;
    });
    std::vector<double> sums(lags.size() * nodes, 0.0);
    std::size_t used = 0;
    std::size_t flagged = 0;
    for (auto const& c : first)
    {
        for (std::size_t r = 0; r < sums.size(); ++r)
        {
            sums[r] += c.sums[r];
        }
        used += c.used;
        flagged += c.flagged;
    }
    if (used < 2)
    {
        throw std::runtime_error("continuity_modulus: fewer than 2 paths survived");
    }
    std::vector<std::size_t> argmax(lags.size(), 0);
    for (std::size_t j = 0; j < lags.size(); ++j)
    {
        double const* row = sums.data() + j * nodes;
        for (std::size_t k = 1; k + lags[j] < nodes; ++k)
        {
            if (row[k] > row[argmax[j]])
            {
                argmax[j] = k;
            }
        }
    }

    // Pass 2: per-path values at each maximising node, for the bootstrap.
    auto second = run_chunks<std::vector<double>>(
        cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
            std::vector<double> rows;
            for (std::size_t i = begin; i < end; ++i)
            {
                auto path = solve_member(cfg, coeffs, i, false);
                if (!path)
                {
                    continue;
                }
                auto const& x = path->values;
                for (std::size_t j = 0; j < lags.size(); ++j)
                {
                    rows.push_back(std::pow(std::abs(x[argmax[j] + lags[j]] - x[argmax[j]]), p));
                }
            }
            return rows;
        });
    std::vector<std::vector<double>> columns(lags.size());
    for (auto const& rows : second)
    {
        for (std::size_t r = 0; r < rows.size(); ++r)
        {
            columns[r % lags.size()].push_back(rows[r]);
        }
    }

    EstimateReport report;
    report.quantity = "continuity";
    report.point_name = "h";
    report.n_effective = used;
    report.flagged_paths = flagged;
    report.estimate = column_means(columns);
    report.ci_upper =
        stats::bootstrap_mean_upper(columns, resamples, confidence, SeedSpec{cfg.master_seed, 1});
    for (std::size_t j = 0; j < lags.size(); ++j)
    {
        report.points.push_back(static_cast<double>(lags[j]) * grid.dt());
        if (j == 0)
        {
            // The widest window has nothing to be compared with.
            report.bound.push_back(report.ci_upper[0]);
            report.pass.push_back(true);
            continue;
        }
        double previous_upper = report.ci_upper[j - 1];
        report.bound.push_back(previous_upper);
        report.pass.push_back(report.estimate[j] < report.estimate[j - 1]
                              || report.estimate[j] <= previous_upper);
    }
    double rho = stats::spearman(report.estimate, report.points);
    report.summary = {{"p", p}, {"spearman", rho}};
    if (!(rho > 0.0))
    {
        report.pass.back() = false;
    }
    return report;
}

PicardStudyReport picard_rate_study(EnsembleConfig const& cfg,
                                    double p,
                                    double tol,
                                    std::size_t max_iter,
                                    std::size_t n_paths)
{
    validate(cfg);
    if (n_paths == 0 || n_paths > cfg.n_paths)
    {
        throw std::invalid_argument("picard_rate_study: path count must be in [1, n_paths]");
    }
    if (!(p > 0.0 && p < cfg.scenario.chars.alpha()))
    {
        throw PreconditionError("picard_rate_study: p must lie in (0, alpha)");
    }
    BoundInputs in = make_bound_inputs(cfg, p);
    CoefficientSpec coeffs = cfg.scenario.coefficients(p);

    PicardStudyReport report;
    report.p = p;
    report.n_paths = n_paths;
    PicardOptions options;
    options.p = p;
    options.solve.placement = cfg.scenario.placement;
    if (p <= 1.0)
    {
        StrongCondition sc = check_strong_condition(in);
        if (!sc.holds)
        {
            throw PreconditionError("picard_rate_study: strong condition fails (lhs = "
                                    + std::to_string(sc.lhs) + ")");
        }
        report.regime = "strong_condition";
        report.analytic_constant = sc.lhs;
        options.metric = PicardMetric::dp;
    }
    else
    {
        try
        {
            in.gamma = choose_gamma(in, coeffs.intensity);
        }
        catch (std::runtime_error const& e)
        {
            throw PreconditionError(std::string("picard_rate_study: ") + e.what());
        }
        report.regime = "weighted_norm";
        report.gamma = in.gamma;
        report.analytic_constant = contraction_constant(in, coeffs.intensity);
        options.metric = PicardMetric::weighted_sup;
        options.gamma = in.gamma;
    }

    double T = cfg.grid.t_end();
    auto chunks = run_chunks<std::vector<PicardPathResult>>(
        n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
            std::vector<PicardPathResult> out;
            for (std::size_t i = begin; i < end; ++i)
            {
                PicardPathResult r;
                r.path_index = i;
                NoisePath noise = ensemble_noise(cfg, i);
                double x0 = ensemble_initial_value(cfg, i);
                double scale = 1.0;
                try
                {
                    PicardResult result =
                        picard_solve(x0, coeffs, cfg.scenario.semigroup, noise, tol, max_iter, options);
                    SolutionPath reference =
                        euler_solve(x0, coeffs, cfg.scenario.semigroup, noise, options.solve);
                    r.converged = true;
                    r.fixed_point_distance = metric_dp(result.path, reference, p);
                    r.history = std::move(result.history);
                    for (double v : reference.values)
                    {
                        scale = std::max(scale, std::abs(v));
                    }
                }
                catch (PicardNotConverged const& e)
                {
                    r.history = e.history();
                }
                catch (StateOverflow const&)
                {
                    r.flagged = true;
                }
                r.iterations = r.history.size();
                // Distances at the rounding level of the state carry no
                // contraction information; skip ratios out of them.
                double unit = 64.0 * std::numeric_limits<double>::epsilon() * scale;
                double floor = options.metric == PicardMetric::dp ? T * std::pow(unit, p) : unit;
                for (std::size_t k = 1; k < r.history.size(); ++k)
                {
                    if (r.history[k - 1] > 100.0 * floor)
                    {
                        double ratio = r.history[k] / r.history[k - 1];
                        if (options.metric == PicardMetric::weighted_sup)
                        {
                            ratio = std::pow(ratio, p);
                        }
                        r.max_ratio = std::max(r.max_ratio, ratio);
                    }
                }
                out.push_back(std::move(r));
            }
            return out;
        });

    for (auto& chunk : chunks)
    {
        for (auto& r : chunk)
        {
            report.max_ratio = std::max(report.max_ratio, r.max_ratio);
            report.max_fixed_point_distance =
                std::max(report.max_fixed_point_distance, r.fixed_point_distance);
            report.non_converged += (!r.converged && !r.flagged) ? 1 : 0;
            report.flagged_paths += r.flagged ? 1 : 0;
            report.paths.push_back(std::move(r));
        }
    }
    return report;
}

}  // namespace stablemild
