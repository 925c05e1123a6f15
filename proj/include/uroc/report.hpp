#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uroc/bootstrap.hpp"
#include "uroc/fairness.hpp"
#include "uroc/step_cdf.hpp"
#include "uroc/synthetic.hpp"

// Plot-ready CSV and JSON exports. Every CSV starts with one comment line
// `# <metadata JSON>`; every JSON document has a top-level "metadata"
// member. Missing values are empty CSV fields and JSON nulls.
namespace uroc::report {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "uroc";
inline constexpr const char* kToolVersion = "0.1.0";

// {"tool", "version", "config": config}.
Json metadata(const Json& config);

std::string curve_csv(const RocCurve& curve, const Json& meta);
std::string curve_json(const RocCurve& curve, const Json& meta);

std::string cdf_csv(const StepCdf& cdf, const Json& meta);

std::string band_csv(const CurveBand& band, const Json& meta);
std::string band_json(const CurveBand& band, const Json& meta);

// `alpha,value` with missing values where the reference curve is 0.
std::string std_curve_csv(std::span<const double> alphas,
                          std::span<const std::optional<double>> values,
                          const Json& meta);
std::string std_curve_json(std::span<const double> alphas,
                           std::span<const std::optional<double>> values,
                           const Json& meta);

// Floored groups are written with their original attribute labels,
// separated by ';'.
std::string fairness_csv(std::span<const FairnessReport> reports,
                         std::span<const std::int64_t> attribute_labels,
                         const Json& meta);
std::string fairness_json(std::span<const FairnessReport> reports,
                          std::span<const std::int64_t> attribute_labels,
                          const Json& meta);

std::string coverage_csv(const CoverageResult& result, const Json& meta);
std::string coverage_json(const CoverageResult& result, const Json& meta);

}  // namespace uroc::report
