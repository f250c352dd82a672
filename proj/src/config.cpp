#include "stablemild/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stablemild/csv.hpp"

namespace stablemild {

ConfigError::ConfigError(std::size_t line, std::string field, std::string const& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string())
                         + (field.empty() ? std::string() : field + ": ") + message),
      line_(line),
      field_(std::move(field))
{
}

namespace {

using LineOf = std::function<std::size_t(std::string const&)>;

std::string trim(std::string const& s)
{
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
    {
        return {};
    }
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(std::string const& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(s);
    while (std::getline(stream, item, sep))
    {
        out.push_back(trim(item));
    }
    return out;
}

struct Entry {
    std::string value;
    std::size_t line;
};

// Known keys per section; anything else is rejected.
std::map<std::string, std::set<std::string>> const& schema()
{
    static std::map<std::string, std::set<std::string>> const keys{
        {"process", {"alpha", "c_plus", "c_minus", "b"}},
        {"semigroup", {"a"}},
        {"coefficients",
         {"F", "F_slope", "F_intercept", "F_clip", "g", "g_value", "g_C0", "g_table", "phi",
          "phi_value", "phi_amplitude", "L_F", "C", "phi_inf"}},
        {"simulation",
         {"T", "n_steps", "n_paths", "seed", "route", "R", "epsilon", "small_jump_policy",
          "jump_placement", "x0", "x0_spread"}},
        {"analysis",
         {"p", "x_levels", "t_points", "h_levels", "tol", "max_iter", "picard_paths", "conjugate"}},
    };
    return keys;
}

class Reader {
  public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(std::string const& field) const { return entries_.count(field) > 0; }

    std::size_t line(std::string const& field) const
    {
        auto it = entries_.find(field);
        return it == entries_.end() ? 0 : it->second.line;
    }

    void get(std::string const& field, double& out) const
    {
        if (auto e = find(field))
        {
            out = to_double(field, e->value, e->line);
        }
    }

    void get(std::string const& field, std::size_t& out) const
    {
        if (auto e = find(field))
        {
            out = static_cast<std::size_t>(to_unsigned(field, e->value, e->line));
        }
    }

    void get(std::string const& field, std::uint64_t& out, int) const
    {
        if (auto e = find(field))
        {
            out = to_unsigned(field, e->value, e->line);
        }
    }

    void get_optional(std::string const& field, std::optional<double>& out) const
    {
        if (auto e = find(field))
        {
            out = to_double(field, e->value, e->line);
        }
    }

    template <class Enum>
    void get_choice(std::string const& field,
                    Enum& out,
                    std::vector<std::pair<std::string, Enum>> const& choices) const
    {
        auto e = find(field);
        if (!e)
        {
            return;
        }
        for (auto const& [name, value] : choices)
        {
            if (e->value == name)
            {
                out = value;
                return;
            }
        }
        std::string allowed;
        for (auto const& [name, value] : choices)
        {
            allowed += (allowed.empty() ? "" : " | ") + name;
        }
        throw ConfigError(e->line, field, "expected one of " + allowed + ", got '" + e->value + "'");
    }

    std::vector<double> list(std::string const& field, std::string const& text, std::size_t line) const
    {
        std::vector<double> out;
        for (auto const& item : split(text, ','))
        {
            out.push_back(to_double(field, item, line));
        }
        return out;
    }

    Entry const* find(std::string const& field) const
    {
        auto it = entries_.find(field);
        return it == entries_.end() ? nullptr : &it->second;
    }

    static double to_double(std::string const& field, std::string const& text, std::size_t line)
    {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        {
            throw ConfigError(line, field, "expected a number, got '" + text + "'");
        }
        if (!std::isfinite(value))
        {
            throw ConfigError(line, field, "value must be finite");
        }
        return value;
    }

    static std::uint64_t to_unsigned(std::string const& field, std::string const& text, std::size_t line)
    {
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        {
            throw ConfigError(line, field, "expected a non-negative integer, got '" + text + "'");
        }
        return value;
    }

  private:
    std::map<std::string, Entry> entries_;
};

std::size_t count_spec(std::string const& field,
                       std::string const& text,
                       std::string const& keyword,
                       std::size_t line)
{
    // "keyword" or "keyword:N"
    auto rest = text.substr(keyword.size());
    if (rest.empty())
    {
        return 0;
    }
    if (rest.front() != ':')
    {
        throw ConfigError(line, field, "malformed '" + text + "'");
    }
    return static_cast<std::size_t>(Reader::to_unsigned(field, trim(rest.substr(1)), line));
}

void check(bool ok, LineOf const& line_of, std::string const& field, std::string const& message)
{
    if (!ok)
    {
        throw ConfigError(line_of(field), field, message);
    }
}

void validate_impl(ScenarioConfig const& c, LineOf const& at)
{
    check(c.alpha > 0.0 && c.alpha < 2.0, at, "process.alpha",
          "must lie in (0, 2), got " + csv::number(c.alpha));
    check(c.alpha >= StableCharacteristics::min_alpha && c.alpha <= StableCharacteristics::max_alpha,
          at, "process.alpha", "must lie in [0.001, 1.999] for finite tail constants");
    check(c.c_plus >= 0.0, at, "process.c_plus", "must be non-negative");
    check(c.c_minus >= 0.0, at, "process.c_minus", "must be non-negative");
    check(c.c_plus + c.c_minus > 0.0, at, "process.c_plus", "c_plus + c_minus must be positive");
    if (c.alpha == 1.0)
    {
        check(c.c_plus == c.c_minus, at, "process.c_minus", "alpha = 1 requires c_plus = c_minus");
        check(c.b == 0.0, at, "process.b", "alpha = 1 requires b = 0");
    }
    check(c.a > 0.0, at, "semigroup.a", "must be positive");

    check(c.drift.kind != DriftKind::clipped_linear || c.drift.clip > 0.0, at, "coefficients.F_clip",
          "must be positive");
    if (c.intensity.kind == IntensityKind::table)
    {
        check(!c.intensity.table.empty(), at, "coefficients.g_table", "table g needs at least one knot");
        for (std::size_t i = 1; i < c.intensity.table.size(); ++i)
        {
            check(c.intensity.table[i].first > c.intensity.table[i - 1].first, at,
                  "coefficients.g_table", "knot times must be strictly increasing");
        }
    }
    check(!c.intensity_auto || c.intensity.kind == IntensityKind::sine, at, "coefficients.g_C0",
          "'auto' applies to g = sine only");
    check(!c.intensity_auto || c.p <= 1.0, at, "coefficients.g_C0",
          "'auto' needs p <= 1, where the strong condition applies");
    if (c.response.kind == ResponseKind::tanh)
    {
        double limit = max_tanh_amplitude(c.p);
        check(std::abs(c.response.amplitude) <= limit * (1.0 + 1e-12), at, "coefficients.phi_amplitude",
              "tanh amplitude must not exceed 2^(p/2-1) = " + csv::number(limit));
    }

    check(c.T > 0.0, at, "simulation.T", "must be positive");
    check(c.n_steps >= 1, at, "simulation.n_steps", "must be at least 1");
    check(c.n_paths >= 2, at, "simulation.n_paths", "must be at least 2");
    check(c.R >= 1.0, at, "simulation.R", "truncation level must be at least 1");
    check(c.epsilon > 0.0 && c.epsilon < c.R, at, "simulation.epsilon", "must lie in (0, R)");
    check(c.x0_spread >= 0.0, at, "simulation.x0_spread", "must be non-negative");

    check(c.p > 0.0 && c.p < c.alpha, at, "analysis.p",
          "must lie in (0, alpha) = (0, " + csv::number(c.alpha) + ")");
    for (double x : c.x_levels)
    {
        check(x > 0.0, at, "analysis.x_levels", "levels must be positive");
    }
    check(!c.x_levels.empty() || c.x_level_count >= 2, at, "analysis.x_levels",
          "automatic levels need a count of at least 2");
    for (double t : c.t_points)
    {
        check(t > 0.0 && t <= c.T, at, "analysis.t_points", "time points must lie in (0, T]");
    }
    check(!c.t_points.empty() || c.t_count >= 1, at, "analysis.t_points", "count must be at least 1");
    check(c.h_levels.size() >= 2, at, "analysis.h_levels", "need at least two windows");
    for (std::size_t i = 0; i < c.h_levels.size(); ++i)
    {
        check(c.h_levels[i] > 0.0 && c.h_levels[i] < c.T, at, "analysis.h_levels",
              "windows must lie in (0, T)");
        check(i == 0 || c.h_levels[i] < c.h_levels[i - 1], at, "analysis.h_levels",
              "windows must be strictly decreasing");
        check(std::round(c.h_levels[i] * static_cast<double>(c.n_steps) / c.T) >= 2.0, at,
              "analysis.h_levels", "every window must span at least two grid steps");
    }
    check(c.tol > 0.0, at, "analysis.tol", "must be positive");
    check(c.max_iter >= 1, at, "analysis.max_iter", "must be at least 1");
    check(c.picard_paths >= 1 && c.picard_paths <= c.n_paths, at, "analysis.picard_paths",
          "must lie in [1, n_paths]");

    // Certification of the presets and any user overrides of their constants.
    Scenario probe;
    probe.drift = c.drift;
    probe.intensity = c.intensity;
    probe.response = c.response;
    probe.overrides = c.overrides;
    try
    {
        (void)probe.coefficients(c.p);
    }
    catch (std::invalid_argument const& e)
    {
        std::string field = "coefficients";
        std::string what = e.what();
        for (char const* key : {"L_F", "C", "phi_inf"})
        {
            if (what.rfind(std::string(key) + " override", 0) == 0)
            {
                field += std::string(".") + key;
            }
        }
        throw ConfigError(at(field), field, what);
    }
}

std::string join(std::vector<double> const& values)
{
    std::string out;
    for (double v : values)
    {
        out += (out.empty() ? "" : ", ") + csv::number(v);
    }
    return out;
}

}  // namespace

ScenarioConfig parse_config(std::istream& in)
{
    std::map<std::string, Entry> entries;
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw))
    {
        ++line_no;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty())
        {
            continue;
        }
        if (line.front() == '[')
        {
            if (line.back() != ']')
            {
                throw ConfigError(line_no, "", "malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section))
            {
                throw ConfigError(line_no, section, "unknown section");
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError(line_no, "", "expected 'key = value', got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty())
        {
            throw ConfigError(line_no, key, "key outside of any section");
        }
        std::string field = section + "." + key;
        if (!schema().at(section).count(key))
        {
            throw ConfigError(line_no, field, "unknown key");
        }
        if (value.empty())
        {
            throw ConfigError(line_no, field, "missing value");
        }
        if (!entries.emplace(field, Entry{value, line_no}).second)
        {
            throw ConfigError(line_no, field, "duplicate key");
        }
    }

    Reader r(std::move(entries));
    ScenarioConfig c;
    for (char const* required : {"process.alpha", "process.c_plus", "process.c_minus", "semigroup.a"})
    {
        if (!r.has(required))
        {
            throw ConfigError(0, required, "required key is missing");
        }
    }
    r.get("process.alpha", c.alpha);
    r.get("process.c_plus", c.c_plus);
    r.get("process.c_minus", c.c_minus);
    r.get("process.b", c.b);
    r.get("semigroup.a", c.a);

    r.get_choice("coefficients.F", c.drift.kind,
                 {{"zero", DriftKind::zero}, {"affine", DriftKind::affine},
                  {"clipped", DriftKind::clipped_linear}});
    r.get("coefficients.F_slope", c.drift.slope);
    r.get("coefficients.F_intercept", c.drift.intercept);
    r.get("coefficients.F_clip", c.drift.clip);
    r.get_choice("coefficients.g", c.intensity.kind,
                 {{"const", IntensityKind::constant}, {"sine", IntensityKind::sine},
                  {"table", IntensityKind::table}});
    r.get("coefficients.g_value", c.intensity.value);
    if (auto e = r.find("coefficients.g_C0"))
    {
        if (e->value == "auto")
        {
            c.intensity_auto = true;
        }
        else
        {
            c.intensity.amplitude = Reader::to_double("coefficients.g_C0", e->value, e->line);
        }
    }
    if (auto e = r.find("coefficients.g_table"))
    {
        for (auto const& knot : split(e->value, ','))
        {
            auto parts = split(knot, ':');
            if (parts.size() != 2)
            {
                throw ConfigError(e->line, "coefficients.g_table", "knots are written t:value");
            }
            c.intensity.table.emplace_back(Reader::to_double("coefficients.g_table", parts[0], e->line),
                                           Reader::to_double("coefficients.g_table", parts[1], e->line));
        }
    }
    r.get_choice("coefficients.phi", c.response.kind,
                 {{"const", ResponseKind::constant}, {"tanh", ResponseKind::tanh}});
    r.get("coefficients.phi_value", c.response.value);
    r.get("coefficients.phi_amplitude", c.response.amplitude);
    r.get_optional("coefficients.L_F", c.overrides.L_F);
    r.get_optional("coefficients.C", c.overrides.C);
    r.get_optional("coefficients.phi_inf", c.overrides.phi_inf);

    r.get("simulation.T", c.T);
    r.get("simulation.n_steps", c.n_steps);
    r.get("simulation.n_paths", c.n_paths);
    r.get("simulation.seed", c.seed, 0);
    r.get_choice("simulation.route", c.route,
                 {{"exact", NoiseRoute::exact}, {"truncated", NoiseRoute::truncated}});
    if (c.route == NoiseRoute::truncated)
    {
        for (char const* required : {"simulation.R", "simulation.epsilon"})
        {
            if (!r.has(required))
            {
                throw ConfigError(r.line("simulation.route"), required,
                                  "required when route = truncated");
            }
        }
    }
    r.get("simulation.R", c.R);
    r.get("simulation.epsilon", c.epsilon);
    r.get_choice("simulation.small_jump_policy", c.small_jump_policy,
                 {{"gaussian", SmallJumpPolicy::gaussian}, {"drop", SmallJumpPolicy::drop}});
    r.get_choice("simulation.jump_placement", c.jump_placement,
                 {{"end_of_step", JumpPlacement::end_of_step}, {"split", JumpPlacement::split}});
    r.get("simulation.x0", c.x0);
    r.get("simulation.x0_spread", c.x0_spread);

    r.get("analysis.p", c.p);
    if (auto e = r.find("analysis.x_levels"))
    {
        if (e->value.rfind("auto", 0) == 0)
        {
            std::size_t n = count_spec("analysis.x_levels", e->value, "auto", e->line);
            c.x_level_count = n == 0 ? c.x_level_count : n;
        }
        else
        {
            c.x_levels = r.list("analysis.x_levels", e->value, e->line);
        }
    }
    if (auto e = r.find("analysis.t_points"))
    {
        if (e->value.rfind("uniform", 0) == 0)
        {
            std::size_t n = count_spec("analysis.t_points", e->value, "uniform", e->line);
            c.t_count = n == 0 ? c.t_count : n;
        }
        else
        {
            c.t_points = r.list("analysis.t_points", e->value, e->line);
        }
    }
    if (auto e = r.find("analysis.h_levels"))
    {
        c.h_levels = r.list("analysis.h_levels", e->value, e->line);
    }
    r.get("analysis.tol", c.tol);
    r.get("analysis.max_iter", c.max_iter);
    r.get("analysis.picard_paths", c.picard_paths);
    r.get_choice("analysis.conjugate", c.convention,
                 {{"unit_below_one", ConjugateConvention::unit_below_one},
                  {"literal", ConjugateConvention::literal}});

    validate_impl(c, [&r](std::string const& field) { return r.line(field); });
    return c;
}

ScenarioConfig load_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError(0, "", "cannot open config file '" + path + "'");
    }
    return parse_config(in);
}

void validate_config(ScenarioConfig const& cfg)
{
    validate_impl(cfg, [](std::string const&) { return std::size_t{0}; });
}

std::string print_config(ScenarioConfig const& c)
{
    auto num = [](double v) { return csv::number(v); };
    auto drift_name = [](DriftKind k) {
        switch (k)
        {
            case DriftKind::zero: return "zero";
            case DriftKind::affine: return "affine";
            case DriftKind::clipped_linear: return "clipped";
        }
        return "zero";
    };
    auto g_name = [](IntensityKind k) {
        switch (k)
        {
            case IntensityKind::constant: return "const";
            case IntensityKind::sine: return "sine";
            case IntensityKind::table: return "table";
        }
        return "const";
    };

    std::ostringstream out;
    out << "[process]\n"
        << "alpha = " << num(c.alpha) << "\n"
        << "c_plus = " << num(c.c_plus) << "\n"
        << "c_minus = " << num(c.c_minus) << "\n"
        << "b = " << num(c.b) << "\n\n";
    out << "[semigroup]\n"
        << "a = " << num(c.a) << "\n\n";
    out << "[coefficients]\n"
        << "F = " << drift_name(c.drift.kind) << "\n"
        << "F_slope = " << num(c.drift.slope) << "\n"
        << "F_intercept = " << num(c.drift.intercept) << "\n"
        << "F_clip = " << num(c.drift.clip) << "\n"
        << "g = " << g_name(c.intensity.kind) << "\n"
        << "g_value = " << num(c.intensity.value) << "\n"
        << "g_C0 = " << (c.intensity_auto ? std::string("auto") : num(c.intensity.amplitude)) << "\n";
    if (!c.intensity.table.empty())
    {
        out << "g_table = ";
        for (std::size_t i = 0; i < c.intensity.table.size(); ++i)
        {
            out << (i ? ", " : "") << num(c.intensity.table[i].first) << ":"
                << num(c.intensity.table[i].second);
        }
        out << "\n";
    }
    out << "phi = " << (c.response.kind == ResponseKind::tanh ? "tanh" : "const") << "\n"
        << "phi_value = " << num(c.response.value) << "\n"
        << "phi_amplitude = " << num(c.response.amplitude) << "\n";
    if (c.overrides.L_F)
    {
        out << "L_F = " << num(*c.overrides.L_F) << "\n";
    }
    if (c.overrides.C)
    {
        out << "C = " << num(*c.overrides.C) << "\n";
    }
    if (c.overrides.phi_inf)
    {
        out << "phi_inf = " << num(*c.overrides.phi_inf) << "\n";
    }
    out << "\n[simulation]\n"
        << "T = " << num(c.T) << "\n"
        << "n_steps = " << c.n_steps << "\n"
        << "n_paths = " << c.n_paths << "\n"
        << "seed = " << c.seed << "\n"
        << "route = " << (c.route == NoiseRoute::exact ? "exact" : "truncated") << "\n"
        << "R = " << num(c.R) << "\n"
        << "epsilon = " << num(c.epsilon) << "\n"
        << "small_jump_policy = "
        << (c.small_jump_policy == SmallJumpPolicy::gaussian ? "gaussian" : "drop") << "\n"
        << "jump_placement = "
        << (c.jump_placement == JumpPlacement::end_of_step ? "end_of_step" : "split") << "\n"
        << "x0 = " << num(c.x0) << "\n"
        << "x0_spread = " << num(c.x0_spread) << "\n\n";
    out << "[analysis]\n"
        << "p = " << num(c.p) << "\n"
        << "x_levels = "
        << (c.x_levels.empty() ? "auto:" + std::to_string(c.x_level_count) : join(c.x_levels)) << "\n"
        << "t_points = "
        << (c.t_points.empty() ? "uniform:" + std::to_string(c.t_count) : join(c.t_points)) << "\n"
        << "h_levels = " << join(c.h_levels) << "\n"
        << "tol = " << num(c.tol) << "\n"
        << "max_iter = " << c.max_iter << "\n"
        << "picard_paths = " << c.picard_paths << "\n"
        << "conjugate = "
        << (c.convention == ConjugateConvention::unit_below_one ? "unit_below_one" : "literal") << "\n";
    return out.str();
}

EnsembleConfig build_ensemble(ScenarioConfig const& c, unsigned threads)
{
    validate_config(c);
    EnsembleConfig e;
    e.n_paths = c.n_paths;
    e.grid = PathGrid(c.T, c.n_steps);
    e.master_seed = c.seed;
    e.threads = threads;
    Scenario& s = e.scenario;
    s.chars = StableCharacteristics(c.alpha, c.c_plus, c.c_minus, c.b);
    s.semigroup = SemigroupParams(c.a);
    s.drift = c.drift;
    s.intensity = c.intensity;
    s.response = c.response;
    s.overrides = c.overrides;
    s.x0 = c.x0;
    s.x0_spread = c.x0_spread;
    s.route = c.route;
    s.truncation.R = c.R;
    s.truncation.epsilon = c.epsilon;
    s.truncation.policy = c.small_jump_policy;
    s.placement = c.jump_placement;
    s.convention = c.convention;
    if (c.intensity_auto)
    {
        s.intensity.kind = IntensityKind::sine;
        s.intensity.amplitude = 0.5 * sine_intensity_threshold(e, c.p);
    }
    return e;
}

std::vector<double> resolve_t_points(ScenarioConfig const& c)
{
    if (!c.t_points.empty())
    {
        return c.t_points;
    }
    std::vector<double> out;
    for (std::size_t k = 1; k <= c.t_count; ++k)
    {
        out.push_back(k == c.t_count ? c.T
                                     : c.T * static_cast<double>(k) / static_cast<double>(c.t_count));
    }
    return out;
}

std::vector<double> resolve_x_levels(ScenarioConfig const& c, double eta_value)
{
    if (!c.x_levels.empty())
    {
        return c.x_levels;
    }
    return geometric_levels(eta_value, 50.0 * eta_value, c.x_level_count);
}

}  // namespace stablemild
