#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "stablemild/bounds.hpp"
#include "stablemild/convolution.hpp"
#include "stablemild/montecarlo.hpp"

namespace stablemild {

nlohmann::ordered_json to_json(EstimateReport const& report);
nlohmann::ordered_json to_json(PicardStudyReport const& report);
nlohmann::ordered_json to_json(BoundInputs const& in);

/// Rows "point,estimate,ci_upper,bound,pass".
void write_estimate_csv(EstimateReport const& report, std::ostream& out);

/// Rows "iter,distance" of one path's Picard history.
void write_picard_csv(PicardPathResult const& path, std::ostream& out);

/// Rows "t,X".
void write_solution_csv(SolutionPath const& path, std::ostream& out);

/// Writes to a sibling temporary file and renames it over `path`, so
/// readers never observe a partial file.
void write_file_atomic(std::filesystem::path const& path, std::string const& content);

}  // namespace stablemild
