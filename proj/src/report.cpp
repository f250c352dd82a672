#include "stablemild/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include "stablemild/csv.hpp"

namespace stablemild {

nlohmann::ordered_json to_json(EstimateReport const& report)
{
    nlohmann::ordered_json j;
    j["quantity"] = report.quantity;
    j["point_name"] = report.point_name;
    j["pass"] = report.all_pass();
    j["n_effective"] = report.n_effective;
    j["flagged_paths"] = report.flagged_paths;
    for (auto const& [name, value] : report.summary)
    {
        j["summary"][name] = value;
    }
    auto& rows = j["points"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.points.size(); ++i)
    {
        rows.push_back({{"point", report.points[i]},
                        {"estimate", report.estimate[i]},
                        {"ci_upper", report.ci_upper[i]},
                        {"bound", report.bound[i]},
                        {"pass", static_cast<bool>(report.pass[i])}});
    }
    return j;
}

nlohmann::ordered_json to_json(PicardStudyReport const& report)
{
    nlohmann::ordered_json j;
    j["quantity"] = "picard";
    j["pass"] = report.pass();
    j["p"] = report.p;
    j["regime"] = report.regime;
    j["analytic_constant"] = report.analytic_constant;
    if (report.regime == "weighted_norm")
    {
        j["gamma"] = report.gamma;
    }
    j["slack"] = report.slack;
    j["max_ratio"] = report.max_ratio;
    j["max_fixed_point_distance"] = report.max_fixed_point_distance;
    j["fixed_point_tolerance"] = report.fixed_point_tolerance;
    j["n_paths"] = report.n_paths;
    j["non_converged"] = report.non_converged;
    j["flagged_paths"] = report.flagged_paths;
    auto& rows = j["paths"] = nlohmann::ordered_json::array();
    for (auto const& path : report.paths)
    {
        rows.push_back({{"path", path.path_index},
                        {"converged", path.converged},
                        {"flagged", path.flagged},
                        {"iterations", path.iterations},
                        {"max_ratio", path.max_ratio},
                        {"fixed_point_distance", path.fixed_point_distance}});
    }
    return j;
}

nlohmann::ordered_json to_json(BoundInputs const& in)
{
    nlohmann::ordered_json j;
    j["a"] = in.a;
    j["b"] = in.b;
    j["phi_inf"] = in.phi_inf;
    j["T"] = in.T;
    j["beta"] = in.beta;
    j["p"] = in.p;
    j["q"] = std::isinf(conjugate_exponent(in.p, in.convention))
                 ? nlohmann::ordered_json("inf")
                 : nlohmann::ordered_json(conjugate_exponent(in.p, in.convention));
    j["C1"] = in.C1;
    j["C2"] = in.C2;
    j["L_F"] = in.L_F;
    j["C"] = in.C;
    j["eta"] = in.eta;
    if (in.h > 0.0)
    {
        j["h"] = in.h;
        j["eta_window"] = in.eta_window;
    }
    j["x0_moment"] = in.x0_moment;
    j["K_nu_T"] = k_nu(in, in.T);
    return j;
}

void write_estimate_csv(EstimateReport const& report, std::ostream& out)
{
    out << "point,estimate,ci_upper,bound,pass\n";
    for (std::size_t i = 0; i < report.points.size(); ++i)
    {
        out << csv::number(report.points[i]) << ',' << csv::number(report.estimate[i]) << ','
            << csv::number(report.ci_upper[i]) << ',' << csv::number(report.bound[i]) << ','
            << (report.pass[i] ? "true" : "false") << '\n';
    }
}

void write_picard_csv(PicardPathResult const& path, std::ostream& out)
{
    out << "iter,distance\n";
    for (std::size_t i = 0; i < path.history.size(); ++i)
    {
        out << i + 1 << ',' << csv::number(path.history[i]) << '\n';
    }
}

void write_solution_csv(SolutionPath const& path, std::ostream& out)
{
    out << "t,X\n";
    for (std::size_t k = 0; k < path.values.size(); ++k)
    {
        out << csv::number(path.grid.time(k)) << ',' << csv::number(path.values[k]) << '\n';
    }
}

void write_file_atomic(std::filesystem::path const& path, std::string const& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out)
        {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
    {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

}  // namespace stablemild
