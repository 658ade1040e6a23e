#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "debtctl/closed_form.hpp"
#include "debtctl/hjb_verify.hpp"
#include "debtctl/monte_carlo.hpp"
#include "debtctl/pde_oracle.hpp"

namespace debtctl {

inline constexpr int json_schema_version = 1;

/// Writes to "<path>.tmp" then renames over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Header line plus one comma-separated row per entry, 17 significant digits.
std::string format_csv(std::span<const std::string> header, std::span<const std::vector<double>> rows);

/// Lower-case, spaces and punctuation collapsed to '_'.
std::string slugify(const std::string& name);

/// {scenario}_{convention}_{artifact}.{ext}
std::string artifact_name(const std::string& scenario, ZetaConvention conv, const std::string& artifact,
                          const std::string& ext);

/// Rows of (x, v, v', v'', u*) on the grid.
std::vector<std::vector<double>> value_curve(const Solution& s, std::span<const double> grid);
std::string value_curve_csv(const Solution& s, std::span<const double> grid);

/// Rows of (t, path_id, x, u).
std::string path_csv(const PathSet& paths);

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const Coefficients& c);
nlohmann::json to_json(const Solution& s);
nlohmann::json to_json(const AdmissibilityReport& r);
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const PastingReport& r);
nlohmann::json to_json(const PropertyReport& r);
nlohmann::json to_json(const OracleComparison& c);
nlohmann::json to_json(const CostEstimate& e);
nlohmann::json to_json(const MomentReport& r);
nlohmann::json to_json(const DominanceReport& r);

/// Non-finite doubles become null.
nlohmann::json number_or_null(double x);

}  // namespace debtctl
