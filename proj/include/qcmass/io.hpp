#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcmass/decomposition.hpp"
#include "qcmass/example_suite.hpp"
#include "qcmass/grid.hpp"
#include "qcmass/signed_measure.hpp"
#include "qcmass/smoothing.hpp"
#include "qcmass/strip_analysis.hpp"

namespace qcmass::io {

using Json = nlohmann::json;

/// Exact value as "p/q" plus `key`_approx with 15 significant digits.
void put_rational(Json& obj, const std::string& key, const Rational& value);
Json rational_array(const std::vector<Rational>& values);
Rational rational_field(const Json& obj, const std::string& key);

Json grid_to_json(const GridDistribution& grid);

struct ParsedGrid {
  GridDistribution grid;  // untagged
  Tag declared = Tag::Signed;
};

/// Structural parse only; the declared tag is returned, not enforced.
/// Throws ParseError naming the offending field.
ParsedGrid grid_from_json(const Json& doc);
/// Parses and enforces the declared tag.
GridDistribution load_grid(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string grid_to_csv(const GridDistribution& grid);

Json validation_to_json(const ValidationReport& qc, const ValidationReport& copula);
std::string validation_summary(const ValidationReport& qc, const ValidationReport& copula);

Json cdf_to_json(const PiecewiseLinearCdf& cdf);
std::string cdf_to_csv(const PiecewiseLinearCdf& cdf);

Json alpha_to_json(const AlphaReport& report);
Json family_to_json(const StripFamily& family);
Json properties_to_json(const PropertyReport& report);

Json plan_to_json(const std::vector<Interval>& k, const std::vector<Interval>& l);
std::pair<std::vector<Interval>, std::vector<Interval>> plan_from_json(const Json& doc);

Json decomposition_to_json(const DecompositionResult& d);

/// Manifest of the series; `grid_files` names the file of each distinct copula.
Json series_manifest(const CopulaSeries& series, const std::vector<std::pair<const GridDistribution*, std::string>>& grid_files);
/// Writes the manifest and one grid file per distinct copula into `dir`.
void write_series(const CopulaSeries& series, const std::filesystem::path& dir);

Json convergence_to_json(const ConvergenceReport& report);
std::string convergence_to_csv(const ConvergenceReport& report);

Json example_to_json(const ExampleReport& report);
std::string example_terms_csv(const ExampleReport& report);
std::string alpha_growth_csv(const std::vector<std::pair<int, Rational>>& table);

}  // namespace qcmass::io
