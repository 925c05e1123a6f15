#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uroc/bootstrap.hpp"
#include "uroc/score_cache.hpp"
#include "uroc/step_cdf.hpp"

namespace uroc {

enum class Side { far, frr };
enum class Metric { max_min, max_geomean, log_geomean, gini };
enum class RateVariant { classic, vstat };
// floor: a zero group rate is replaced by half of one pair's weight in that
// group and flagged. strict: zero rates are kept and metrics that need them
// positive throw UndefinedMetricError.
enum class ZeroPolicy { floor, strict };

std::string_view to_string(Side side);
std::string_view to_string(Metric metric);
Side parse_side(std::string_view name);
Metric parse_metric(std::string_view name);
inline constexpr Metric kAllMetrics[] = {Metric::max_min, Metric::max_geomean,
                                         Metric::log_geomean, Metric::gini};
inline constexpr Side kAllSides[] = {Side::far, Side::frr};

// Per-attribute FAR_a(t) or FRR_a(t).
struct GroupRates {
  Side side = Side::far;
  double threshold = 0.0;
  std::vector<double> rates;   // indexed by dense attribute
  std::vector<bool> floored;   // rate was 0 and got floored
};

// t_alpha = G^{-1}(1 - alpha) for the global impostor CDF in use.
double global_threshold(const StepCdf& impostor, double alpha);

GroupRates group_rates(const ScoreCache& cache, Side side, double t,
                       RateVariant variant,
                       ZeroPolicy zeros = ZeroPolicy::floor);
GroupRates group_rates(const ScoreCache& cache, Side side, double t,
                       const MultiplicityVector& m,
                       ZeroPolicy zeros = ZeroPolicy::floor);

// Value substituted for a zero rate of `attribute` on `side`.
double zero_rate_floor(const ScoreCache& cache, Side side, int attribute);

// (prod_a r_a)^(1/|A|), computed in log space.
double geometric_mean(std::span<const double> rates);
double max_min_ratio(std::span<const double> rates);
double max_geomean_ratio(std::span<const double> rates);
double log_geomean_sum(std::span<const double> rates);
// |A|/(|A|-1) * sum_a sum_b |r_a - r_b| / (2 |A|^2 geomean). Requires at
// least two groups.
double gini_coefficient(std::span<const double> rates);

// Dispatch by metric id. A single group is perfectly fair: every ratio is 1
// and the log sum and Gini are 0.
double fairness_metric(Metric metric, std::span<const double> rates);

struct FairnessOptions {
  std::size_t replicates = 100;
  double alpha_ci = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  ZeroPolicy zeros = ZeroPolicy::floor;
};

struct FairnessReport {
  Metric metric = Metric::max_geomean;
  Side side = Side::far;
  std::vector<double> alphas;
  std::vector<double> classic;
  std::vector<double> vstat;
  // NaN where every replicate was undefined.
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> replicate_std;
  std::vector<std::optional<double>> normalized_std;
  // Attributes whose classic rate was floored, per alpha.
  std::vector<std::vector<int>> floored_groups;
  // Replicates dropped because the metric was undefined, per alpha.
  std::vector<std::size_t> excluded_replicates;
  std::size_t replicates = 0;
  double alpha_ci = 0.05;
  std::uint64_t seed = 0;
};

// Recentered bootstrap bands for every requested (metric, side), sharing
// one set of replicates: gap_b = metric(bootstrap rates at the replicate's
// own t_alpha) - metric(V-statistic rates at the classic t_alpha), band =
// classic + gap quantiles. Replicate b uses the same multiplicities as
// replicate b of roc_confidence_band with the same seed.
std::vector<FairnessReport> fairness_bands(const ScoreCache& cache,
                                           std::span<const Metric> metrics,
                                           std::span<const Side> sides,
                                           std::span<const double> alphas,
                                           const FairnessOptions& options);

FairnessReport fairness_band(const ScoreCache& cache, Metric metric,
                             Side side, std::span<const double> alphas,
                             const FairnessOptions& options);

}  // namespace uroc
