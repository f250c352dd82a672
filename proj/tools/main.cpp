// Command-line front end: runs the verification studies of one scenario file
// and writes report.json plus per-study CSV files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stablemild/config.hpp"
#include "stablemild/levy_model.hpp"
#include "stablemild/montecarlo.hpp"
#include "stablemild/report.hpp"

namespace fs = std::filesystem;
using namespace stablemild;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_config = 2, exit_runtime = 3 };

enum class Status { pass, fail, skip, error };

char const* status_name(Status s)
{
    switch (s)
    {
        case Status::pass: return "PASS";
        case Status::fail: return "FAIL";
        case Status::skip: return "SKIP";
        case Status::error: return "ERROR";
    }
    return "ERROR";
}

// Runtime failure that maps to exit code 3.
struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Run {
    ScenarioConfig config;
    EnsembleConfig ensemble;
    fs::path out_dir;
    json report;
    bool standalone = true;  // false inside `all`
    std::vector<std::pair<std::string, Status>> results;

    void write_text(std::string const& name, std::string const& content) const
    {
        write_file_atomic(out_dir / name, content);
    }

    void record(std::string const& name, Status status, std::string const& detail)
    {
        std::cout << status_name(status) << ' ' << name << ": " << detail << '\n';
        report["status"][name] = status_name(status);
        results.emplace_back(name, status);
    }
};

void check_overflow(std::string const& name, std::size_t flagged, std::size_t n)
{
    if (static_cast<double>(flagged) > overflow_budget * static_cast<double>(n))
    {
        throw RuntimeFailure(name + ": " + std::to_string(flagged) + " of " + std::to_string(n)
                             + " paths overflowed, above the 0.01% budget");
    }
}

template <class Writer>
std::string render(Writer const& writer)
{
    std::ostringstream out;
    writer(out);
    return out.str();
}

void run_constants(Run& run)
{
    ScenarioConfig const& c = run.config;
    EnsembleConfig const& e = run.ensemble;
    auto const& chars = e.scenario.chars;
    BoundInputs in = make_bound_inputs(e, c.p, c.h_levels.back());
    json j = to_json(in);
    j["K_nu_h"] = k_nu(in, in.h);
    j["tail_mass_R"] = tail_mass(chars, c.R);
    j["small_second_moment_R"] = small_second_moment(chars, c.R);
    j["b_R"] = truncated_drift(chars, c.R);
    StableLaw law = stable_law(chars);
    j["stable_scale"] = law.scale;
    j["stable_skew"] = law.skew;
    j["stable_location"] = law.location;
    j["g_amplitude"] = e.scenario.intensity.amplitude;
    j["moment_bound"] = moment_bound(in);
    if (c.p <= 1.0)
    {
        StrongCondition sc = check_strong_condition(in);
        j["strong_condition_lhs"] = sc.lhs;
        j["strong_condition_holds"] = sc.holds;
    }
    else
    {
        auto g = e.scenario.coefficients(c.p).intensity;
        try
        {
            in.gamma = choose_gamma(in, g);
            j["gamma"] = in.gamma;
            j["contraction_constant"] = contraction_constant(in, g);
        }
        catch (std::runtime_error const&)
        {
            j["gamma"] = nullptr;
        }
    }
    run.report["constants"] = j;
    run.record("constants", Status::pass,
               "eta = " + std::to_string(in.eta) + ", K_nu(T) = " + std::to_string(k_nu(in, in.T)));
}

void run_simulate(Run& run)
{
    EnsembleConfig const& e = run.ensemble;
    NoisePath noise = ensemble_noise(e, 0);
    run.write_text("paths.csv", render([&](std::ostream& o) { write_path_csv(noise, o); }));
    run.write_text("jumps.csv", render([&](std::ostream& o) { write_jumps_csv(noise, o); }));
    json j;
    j["path"] = 0;
    j["Z_T"] = noise.terminal_value();
    j["big_jumps"] = noise.big_jumps.size();
    try
    {
        SolveOptions options;
        options.placement = e.scenario.placement;
        SolutionPath x = euler_solve(ensemble_initial_value(e, 0), e.scenario.coefficients(run.config.p),
                                     e.scenario.semigroup, noise, options);
        run.write_text("solution.csv", render([&](std::ostream& o) { write_solution_csv(x, o); }));
        j["X_T"] = x.values.back();
    }
    catch (StateOverflow const& overflow)
    {
        throw RuntimeFailure("simulate: path 0 overflowed at step " + std::to_string(overflow.step()));
    }
    run.report["simulate"] = j;
    run.record("simulate", Status::pass, "path 0 written to paths.csv, jumps.csv, solution.csv");
}

void finish_estimate(Run& run, std::string const& name, EstimateReport const& rep)
{
    run.write_text(rep.quantity + ".csv", render([&](std::ostream& o) { write_estimate_csv(rep, o); }));
    run.report["studies"][rep.quantity] = to_json(rep);
    std::size_t ok = 0;
    for (bool b : rep.pass)
    {
        ok += b ? 1 : 0;
    }
    check_overflow(name, rep.flagged_paths, run.ensemble.n_paths);
    run.record(name, rep.all_pass() ? Status::pass : Status::fail,
               std::to_string(ok) + "/" + std::to_string(rep.pass.size()) + " points, "
                   + std::to_string(rep.flagged_paths) + " flagged paths");
}

void run_tail(Run& run)
{
    double eta_value = make_bound_inputs(run.ensemble, 0.5 * run.config.alpha).eta;
    auto rep = empirical_tail(run.ensemble, resolve_x_levels(run.config, eta_value));
    finish_estimate(run, "verify-tail", rep);
}

void run_moment(Run& run)
{
    auto rep = empirical_moment(run.ensemble, run.config.p, resolve_t_points(run.config));
    finish_estimate(run, "verify-moment", rep);
}

void run_continuity(Run& run)
{
    auto rep = continuity_modulus(run.ensemble, run.config.p, run.config.h_levels);
    finish_estimate(run, "verify-continuity", rep);
}

void run_picard(Run& run)
{
    ScenarioConfig const& c = run.config;
    PicardStudyReport rep;
    try
    {
        rep = picard_rate_study(run.ensemble, c.p, c.tol, c.max_iter, c.picard_paths);
    }
    catch (PreconditionError const& e)
    {
        if (run.standalone)
        {
            throw;
        }
        run.report["studies"]["picard"] = json{{"skipped", e.what()}};
        run.record("picard", Status::skip, e.what());
        return;
    }
    if (!rep.paths.empty())
    {
        run.write_text("picard.csv", render([&](std::ostream& o) { write_picard_csv(rep.paths[0], o); }));
    }
    run.report["studies"]["picard"] = to_json(rep);
    if (rep.non_converged > 0)
    {
        throw RuntimeFailure("picard: " + std::to_string(rep.non_converged) + " paths did not converge");
    }
    check_overflow("picard", rep.flagged_paths, rep.n_paths);
    std::ostringstream detail;
    detail << "max ratio " << rep.max_ratio << " vs constant " << rep.analytic_constant << " + "
           << rep.slack << ", fixed-point distance " << rep.max_fixed_point_distance;
    run.record("picard", rep.pass() ? Status::pass : Status::fail, detail.str());
}

int finish(Run& run)
{
    bool all_pass = true;
    for (auto const& [name, status] : run.results)
    {
        all_pass = all_pass && (status == Status::pass || status == Status::skip);
    }
    run.report["pass"] = all_pass;
    run.write_text("report.json", run.report.dump(2) + "\n");
    return all_pass ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mild solutions of stable-driven evolution equations: simulation and bound checks"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    unsigned threads = 1;
    bool print = false;
    app.add_option("--config", config_path, "Scenario file")->required();
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Override the master seed");
    app.add_option("--paths", paths, "Override the number of paths");
    app.add_option("--threads", threads, "Worker threads (results do not depend on it)")
        ->check(CLI::Range(1u, 1024u));
    app.add_flag("--print-config", print, "Print the canonical scenario and exit");

    std::vector<std::pair<std::string, std::string>> const commands{
        {"simulate", "Write the noise, jumps and solution of path 0"},
        {"constants", "Report the analytic constants"},
        {"verify-tail", "Empirical tail of the stochastic convolution vs the tail bound"},
        {"verify-moment", "Empirical p-th moments vs the moment bound"},
        {"verify-continuity", "Continuity modulus trend in the window h"},
        {"picard", "Picard contraction rates vs the analytic constant"},
        {"all", "Every study above"},
    };
    for (auto const& [name, help] : commands)
    {
        app.add_subcommand(name, help);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config;
    }

    Run run;
    try
    {
        run.config = load_config(config_path);
        if (seed)
        {
            run.config.seed = *seed;
        }
        if (paths)
        {
            run.config.n_paths = *paths;
            run.config.picard_paths = std::min(run.config.picard_paths, *paths);
        }
        validate_config(run.config);
        if (print)
        {
            std::cout << print_config(run.config);
            return exit_pass;
        }
        if (app.get_subcommands().empty())
        {
            std::cerr << "error: a subcommand is required\n" << app.help();
            return exit_config;
        }
        run.ensemble = build_ensemble(run.config, threads);
    }
    catch (ConfigError const& e)
    {
        std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
        return exit_config;
    }
    catch (std::invalid_argument const& e)
    {
        std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
        return exit_config;
    }

    std::string command = app.get_subcommands().front()->get_name();
    run.out_dir = out_dir;
    run.standalone = command != "all";
    run.report["command"] = command;
    run.report["scenario"] = print_config(run.config);
    run.report["g_amplitude"] = run.ensemble.scenario.intensity.amplitude;

    try
    {
        fs::create_directories(run.out_dir);
        if (command == "simulate" || command == "all")
        {
            run_simulate(run);
        }
        if (command == "constants" || command == "all")
        {
            run_constants(run);
        }
        if (command == "verify-tail" || command == "all")
        {
            run_tail(run);
        }
        if (command == "verify-moment" || command == "all")
        {
            run_moment(run);
        }
        if (command == "verify-continuity" || command == "all")
        {
            run_continuity(run);
        }
        if (command == "picard" || command == "all")
        {
            run_picard(run);
        }
    }
    catch (PreconditionError const& e)
    {
        std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
        return exit_config;
    }
    catch (RuntimeFailure const& e)
    {
        std::cerr << "runtime failure: " << e.what() << '\n';
        run.report["error"] = e.what();
        finish(run);
        return exit_runtime;
    }
    catch (std::invalid_argument const& e)
    {
        std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
        return exit_config;
    }
    catch (std::exception const& e)
    {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return exit_runtime;
    }

    try
    {
        return finish(run);
    }
    catch (std::exception const& e)
    {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return exit_runtime;
    }
}
