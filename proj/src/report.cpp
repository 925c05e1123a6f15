#include "uroc/report.hpp"

#include <cmath>

#include "uroc/text.hpp"

namespace uroc::report {

namespace {

std::string header_line(const Json& meta) { return "# " + meta.dump() + "\n"; }

std::string num(double v) {
  return std::isfinite(v) ? text::format_double(v) : std::string();
}

std::string num(const std::optional<double>& v) {
  return v ? num(*v) : std::string();
}

Json jnum(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json jnum(const std::optional<double>& v) {
  return v ? jnum(*v) : Json(nullptr);
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

Json metadata(const Json& config) {
  return Json{{"tool", kToolName}, {"version", kToolVersion}, {"config", config}};
}

std::string curve_csv(const RocCurve& curve, const Json& meta) {
  std::string out = header_line(meta) + "alpha,value\n";
  for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
    out += num(curve.alphas[i]) + ',' + num(curve.values[i]) + '\n';
  }
  return out;
}

std::string curve_json(const RocCurve& curve, const Json& meta) {
  Json points = Json::array();
  for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
    points.push_back({{"alpha", curve.alphas[i]}, {"value", jnum(curve.values[i])}});
  }
  return dump({{"metadata", meta}, {"curve", points}});
}

std::string cdf_csv(const StepCdf& cdf, const Json& meta) {
  std::string out = header_line(meta) + "threshold,cumulative\n";
  for (std::size_t i = 0; i < cdf.thresholds().size(); ++i) {
    out += num(cdf.thresholds()[i]) + ',' + num(cdf.cumulative()[i]) + '\n';
  }
  return out;
}

std::string band_csv(const CurveBand& band, const Json& meta) {
  std::string out =
      header_line(meta) + "alpha,estimate,lower,upper,replicate_std\n";
  for (std::size_t i = 0; i < band.alphas.size(); ++i) {
    out += num(band.alphas[i]) + ',' + num(band.estimate[i]) + ',' +
           num(band.lower[i]) + ',' + num(band.upper[i]) + ',' +
           num(band.replicate_std[i]) + '\n';
  }
  return out;
}

std::string band_json(const CurveBand& band, const Json& meta) {
  Json points = Json::array();
  for (std::size_t i = 0; i < band.alphas.size(); ++i) {
    points.push_back({{"alpha", band.alphas[i]},
                      {"estimate", jnum(band.estimate[i])},
                      {"lower", jnum(band.lower[i])},
                      {"upper", jnum(band.upper[i])},
                      {"replicate_std", jnum(band.replicate_std[i])}});
  }
  return dump({{"metadata", meta},
               {"B", band.replicates},
               {"alpha_CI", band.alpha_ci},
               {"seed", band.seed},
               {"mode", std::string(to_string(band.mode))},
               {"band", points}});
}

std::string std_curve_csv(std::span<const double> alphas,
                          std::span<const std::optional<double>> values,
                          const Json& meta) {
  std::string out = header_line(meta) + "alpha,value\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out += num(alphas[i]) + ',' + num(values[i]) + '\n';
  }
  return out;
}

std::string std_curve_json(std::span<const double> alphas,
                           std::span<const std::optional<double>> values,
                           const Json& meta) {
  Json points = Json::array();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    points.push_back({{"alpha", alphas[i]}, {"value", jnum(values[i])}});
  }
  return dump({{"metadata", meta}, {"curve", points}});
}

namespace {

std::string floored_labels(const std::vector<int>& groups,
                           std::span<const std::int64_t> labels) {
  std::string out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(labels[static_cast<std::size_t>(groups[i])]);
  }
  return out;
}

}  // namespace

std::string fairness_csv(std::span<const FairnessReport> reports,
                         std::span<const std::int64_t> attribute_labels,
                         const Json& meta) {
  std::string out = header_line(meta) +
                    "alpha,metric,side,classic,lower,upper,replicate_std,"
                    "normalized_std,floored_groups\n";
  for (const FairnessReport& r : reports) {
    for (std::size_t i = 0; i < r.alphas.size(); ++i) {
      out += num(r.alphas[i]) + ',' + std::string(to_string(r.metric)) + ',' +
             std::string(to_string(r.side)) + ',' + num(r.classic[i]) + ',' +
             num(r.lower[i]) + ',' + num(r.upper[i]) + ',' +
             num(r.replicate_std[i]) + ',' + num(r.normalized_std[i]) + ',' +
             floored_labels(r.floored_groups[i], attribute_labels) + '\n';
    }
  }
  return out;
}

std::string fairness_json(std::span<const FairnessReport> reports,
                          std::span<const std::int64_t> attribute_labels,
                          const Json& meta) {
  Json docs = Json::array();
  for (const FairnessReport& r : reports) {
    Json points = Json::array();
    for (std::size_t i = 0; i < r.alphas.size(); ++i) {
      Json floored = Json::array();
      for (int a : r.floored_groups[i]) {
        floored.push_back(attribute_labels[static_cast<std::size_t>(a)]);
      }
      points.push_back({{"alpha", r.alphas[i]},
                        {"classic", jnum(r.classic[i])},
                        {"vstat", jnum(r.vstat[i])},
                        {"lower", jnum(r.lower[i])},
                        {"upper", jnum(r.upper[i])},
                        {"replicate_std", jnum(r.replicate_std[i])},
                        {"normalized_std", jnum(r.normalized_std[i])},
                        {"floored_groups", floored},
                        {"excluded_replicates", r.excluded_replicates[i]}});
    }
    docs.push_back({{"metric", std::string(to_string(r.metric))},
                    {"side", std::string(to_string(r.side))},
                    {"B", r.replicates},
                    {"alpha_CI", r.alpha_ci},
                    {"seed", r.seed},
                    {"points", points}});
  }
  return dump({{"metadata", meta}, {"reports", docs}});
}

std::string coverage_csv(const CoverageResult& result, const Json& meta) {
  std::string out = header_line(meta) + "alpha,mode,coverage,reps,B\n";
  for (const auto& [mode, values] :
       {std::pair{"recentered", &result.recentered},
        std::pair{"naive", &result.naive}}) {
    for (std::size_t i = 0; i < result.alphas.size(); ++i) {
      out += num(result.alphas[i]) + ',' + mode + ',' + num((*values)[i]) +
             ',' + std::to_string(result.reps) + ',' +
             std::to_string(result.replicates) + '\n';
    }
  }
  return out;
}

std::string coverage_json(const CoverageResult& result, const Json& meta) {
  Json points = Json::array();
  for (std::size_t i = 0; i < result.alphas.size(); ++i) {
    points.push_back({{"alpha", result.alphas[i]},
                      {"truth", jnum(result.truth[i])},
                      {"truth_se", jnum(result.truth_se[i])},
                      {"recentered", result.recentered[i]},
                      {"naive", result.naive[i]}});
  }
  return dump({{"metadata", meta},
               {"reps", result.reps},
               {"B", result.replicates},
               {"coverage", points}});
}

}  // namespace uroc::report
