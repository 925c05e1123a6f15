#include "uroc/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uroc/error.hpp"
#include "uroc/parallel.hpp"
#include "uroc/pair_table.hpp"

namespace uroc {

std::string_view to_string(Side side) {
  return side == Side::far ? "FAR" : "FRR";
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::max_min:
      return "max_min";
    case Metric::max_geomean:
      return "max_geomean";
    case Metric::log_geomean:
      return "log_geomean";
    case Metric::gini:
      return "gini";
  }
  return "unknown";
}

Side parse_side(std::string_view name) {
  if (name == "FAR" || name == "far") return Side::far;
  if (name == "FRR" || name == "frr") return Side::frr;
  throw InputError("unknown side: " + std::string(name));
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown fairness metric: " + std::string(name));
}

double global_threshold(const StepCdf& impostor, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("FAR level must lie in (0, 1)");
  }
  return impostor.quantile(1.0 - alpha);
}

double zero_rate_floor(const ScoreCache& cache, Side side, int attribute) {
  if (side == Side::far) {
    double pairs = 0.0;
    for (const ImpostorBlock& b : cache.impostor_blocks()) {
      if (cache.identity_attribute(b.first) == attribute &&
          cache.identity_attribute(b.second) == attribute) {
        pairs += static_cast<double>(cache.identity_size(b.first) *
                                     cache.identity_size(b.second));
      }
    }
    if (pairs == 0.0) {
      throw InputError("no impostor pair for attribute " +
                       std::to_string(cache.attribute_label(attribute)));
    }
    return 1.0 / (2.0 * pairs);
  }
  // Smallest single-pair mass in F^a: 1 / (K_a C(n_k, 2)) for the identity
  // with the most pairs.
  const auto identities =
      static_cast<double>(cache.attribute_identity_count(attribute));
  double largest = 0.0;
  for (std::size_t k = 0; k < cache.identity_count(); ++k) {
    if (cache.identity_attribute(k) != attribute) continue;
    const auto n = static_cast<double>(cache.identity_size(k));
    largest = std::max(largest, n * (n - 1.0) / 2.0);
  }
  if (largest == 0.0) {
    throw InputError("no identity for attribute " +
                     std::to_string(cache.attribute_label(attribute)));
  }
  return 1.0 / (2.0 * identities * largest);
}

namespace {

void apply_zero_policy(GroupRates& rates, std::span<const double> floors,
                       ZeroPolicy zeros) {
  rates.floored.assign(rates.rates.size(), false);
  if (zeros == ZeroPolicy::strict) return;
  for (std::size_t a = 0; a < rates.rates.size(); ++a) {
    if (rates.rates[a] == 0.0) {
      rates.rates[a] = floors[a];
      rates.floored[a] = true;
    }
  }
}

std::vector<double> floors_for(const ScoreCache& cache, Side side) {
  std::vector<double> floors;
  for (std::size_t a = 0; a < cache.attribute_count(); ++a) {
    floors.push_back(zero_rate_floor(cache, side, static_cast<int>(a)));
  }
  return floors;
}

// Scope tables per attribute, built once.
struct GroupTables {
  std::vector<PairTable> genuine;
  std::vector<PairTable> impostor;

  explicit GroupTables(const ScoreCache& cache) {
    for (std::size_t a = 0; a < cache.attribute_count(); ++a) {
      genuine.push_back(PairTable::genuine(cache, static_cast<int>(a)));
      impostor.push_back(PairTable::impostor(cache, static_cast<int>(a)));
    }
  }
};

}  // namespace

GroupRates group_rates(const ScoreCache& cache, Side side, double t,
                       RateVariant variant, ZeroPolicy zeros) {
  GroupRates out;
  out.side = side;
  out.threshold = t;
  for (std::size_t a = 0; a < cache.attribute_count(); ++a) {
    const int attr = static_cast<int>(a);
    if (side == Side::frr) {
      const PairTable table = PairTable::genuine(cache, attr);
      out.rates.push_back(variant == RateVariant::classic
                              ? table.u_statistic()(t)
                              : table.v_statistic()(t));
    } else {
      // The two-sample statistic is its own V-statistic.
      out.rates.push_back(1.0 - PairTable::impostor(cache, attr).u_statistic()(t));
    }
  }
  apply_zero_policy(out, floors_for(cache, side), zeros);
  return out;
}

GroupRates group_rates(const ScoreCache& cache, Side side, double t,
                       const MultiplicityVector& m, ZeroPolicy zeros) {
  GroupRates out;
  out.side = side;
  out.threshold = t;
  for (std::size_t a = 0; a < cache.attribute_count(); ++a) {
    const int attr = static_cast<int>(a);
    if (side == Side::frr) {
      out.rates.push_back(weighted_genuine_cdf(cache, m, attr)(t));
    } else {
      out.rates.push_back(1.0 - weighted_impostor_cdf(cache, m, attr)(t));
    }
  }
  apply_zero_policy(out, floors_for(cache, side), zeros);
  return out;
}

namespace {

void require_positive(std::span<const double> rates, const char* metric) {
  for (std::size_t a = 0; a < rates.size(); ++a) {
    if (!(rates[a] > 0.0)) {
      throw UndefinedMetricError(
          std::string(metric) + " is undefined: rate of attribute " +
              std::to_string(a) + " is zero",
          static_cast<int>(a));
    }
  }
}

void require_nonempty(std::span<const double> rates) {
  if (rates.empty()) throw InputError("fairness metric of no groups");
}

}  // namespace

double geometric_mean(std::span<const double> rates) {
  require_nonempty(rates);
  require_positive(rates, "geometric mean");
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  if (*lo == *hi) return *lo;
  // Sorted summation makes the result independent of group order.
  std::vector<double> logs;
  logs.reserve(rates.size());
  for (double r : rates) logs.push_back(std::log(r));
  std::sort(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += l;
  return std::exp(sum / static_cast<double>(rates.size()));
}

double max_min_ratio(std::span<const double> rates) {
  require_nonempty(rates);
  require_positive(rates, "max-min ratio");
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  return *hi / *lo;
}

double max_geomean_ratio(std::span<const double> rates) {
  require_nonempty(rates);
  const double g = geometric_mean(rates);
  return *std::max_element(rates.begin(), rates.end()) / g;
}

double log_geomean_sum(std::span<const double> rates) {
  require_nonempty(rates);
  const double g = geometric_mean(rates);
  std::vector<double> terms;
  terms.reserve(rates.size());
  for (double r : rates) terms.push_back(std::abs(std::log10(r / g)));
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

double gini_coefficient(std::span<const double> rates) {
  if (rates.size() < 2) {
    throw InputError("the Gini coefficient needs at least two groups");
  }
  const double g = geometric_mean(rates);
  std::vector<double> sorted(rates.begin(), rates.end());
  std::sort(sorted.begin(), sorted.end());
  double pair_sum = 0.0;
  for (double x : sorted) {
    for (double y : sorted) pair_sum += std::abs(x - y);
  }
  const auto groups = static_cast<double>(rates.size());
  return groups / (groups - 1.0) * pair_sum / (2.0 * groups * groups * g);
}

double fairness_metric(Metric metric, std::span<const double> rates) {
  require_nonempty(rates);
  if (rates.size() == 1) {
    return (metric == Metric::max_min || metric == Metric::max_geomean) ? 1.0
                                                                        : 0.0;
  }
  switch (metric) {
    case Metric::max_min:
      return max_min_ratio(rates);
    case Metric::max_geomean:
      return max_geomean_ratio(rates);
    case Metric::log_geomean:
      return log_geomean_sum(rates);
    case Metric::gini:
      return gini_coefficient(rates);
  }
  throw InputError("unknown fairness metric");
}

std::vector<FairnessReport> fairness_bands(const ScoreCache& cache,
                                           std::span<const Metric> metrics,
                                           std::span<const Side> sides,
                                           std::span<const double> alphas,
                                           const FairnessOptions& options) {
  if (options.replicates < 2) {
    throw InputError("at least 2 bootstrap replicates are required");
  }
  if (!(options.alpha_ci > 0.0 && options.alpha_ci <= 1.0)) {
    throw InputError("alpha_ci must lie in (0, 1]");
  }
  const std::size_t A = cache.attribute_count();
  const std::size_t n_alpha = alphas.size();
  const PairTable global = PairTable::impostor(cache);
  const GroupTables groups(cache);
  const std::vector<double> far_floor = floors_for(cache, Side::far);
  const std::vector<double> frr_floor = floors_for(cache, Side::frr);

  struct Target {
    Metric metric;
    Side side;
  };
  std::vector<Target> targets;
  for (Side s : sides) {
    for (Metric m : metrics) targets.push_back({m, s});
  }

  auto floor_of = [&](Side s) -> const std::vector<double>& {
    return s == Side::far ? far_floor : frr_floor;
  };
  auto finish = [&](Side s, std::vector<double>& rates,
                    std::vector<int>* floored) {
    if (options.zeros == ZeroPolicy::strict) return;
    for (std::size_t a = 0; a < A; ++a) {
      if (rates[a] == 0.0) {
        rates[a] = floor_of(s)[a];
        if (floored) floored->push_back(static_cast<int>(a));
      }
    }
  };

  // Classic and V-statistic evaluation at the classic thresholds.
  std::vector<StepCdf> frr_u, frr_v, far_u;
  for (std::size_t a = 0; a < A; ++a) {
    frr_u.push_back(groups.genuine[a].u_statistic());
    frr_v.push_back(groups.genuine[a].v_statistic());
    far_u.push_back(groups.impostor[a].u_statistic());
  }
  const StepCdf global_u = global.u_statistic();

  std::vector<FairnessReport> reports(targets.size());
  for (std::size_t r = 0; r < targets.size(); ++r) {
    FairnessReport& rep = reports[r];
    rep.metric = targets[r].metric;
    rep.side = targets[r].side;
    rep.alphas.assign(alphas.begin(), alphas.end());
    rep.replicates = options.replicates;
    rep.alpha_ci = options.alpha_ci;
    rep.seed = options.seed;
  }
  for (std::size_t i = 0; i < n_alpha; ++i) {
    const double t = global_threshold(global_u, alphas[i]);
    for (Side s : {Side::far, Side::frr}) {
      std::vector<double> classic(A), vstat(A);
      for (std::size_t a = 0; a < A; ++a) {
        if (s == Side::far) {
          classic[a] = vstat[a] = 1.0 - far_u[a](t);
        } else {
          classic[a] = frr_u[a](t);
          vstat[a] = frr_v[a](t);
        }
      }
      std::vector<int> floored;
      finish(s, classic, &floored);
      finish(s, vstat, nullptr);
      for (std::size_t r = 0; r < targets.size(); ++r) {
        if (targets[r].side != s) continue;
        reports[r].classic.push_back(fairness_metric(targets[r].metric, classic));
        reports[r].vstat.push_back(fairness_metric(targets[r].metric, vstat));
        reports[r].floored_groups.push_back(floored);
      }
    }
  }

  // values[b][target][alpha], NaN when undefined.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::vector<double>>> values(options.replicates);
  parallel_for(options.replicates, options.threads, [&](std::size_t b) {
    auto rng = replicate_rng(options.seed, b);
    const auto m = resample_multiplicities(rng, cache);
    const StepCdf global_star = global.resampled(m.counts);
    std::vector<StepCdf> frr_star, far_star;
    for (std::size_t a = 0; a < A; ++a) {
      frr_star.push_back(groups.genuine[a].resampled(m.counts));
      far_star.push_back(groups.impostor[a].resampled(m.counts));
    }
    auto& out = values[b];
    out.assign(targets.size(), std::vector<double>(n_alpha, nan));
    std::vector<double> far_rates(A), frr_rates(A);
    for (std::size_t i = 0; i < n_alpha; ++i) {
      const double t = global_threshold(global_star, alphas[i]);
      for (std::size_t a = 0; a < A; ++a) {
        far_rates[a] = 1.0 - far_star[a](t);
        frr_rates[a] = frr_star[a](t);
      }
      finish(Side::far, far_rates, nullptr);
      finish(Side::frr, frr_rates, nullptr);
      for (std::size_t r = 0; r < targets.size(); ++r) {
        const auto& rates = targets[r].side == Side::far ? far_rates : frr_rates;
        try {
          out[r][i] = fairness_metric(targets[r].metric, rates);
        } catch (const UndefinedMetricError&) {
          // Left as NaN and counted as excluded.
        }
      }
    }
  });

  std::vector<double> column;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    FairnessReport& rep = reports[r];
    for (std::size_t i = 0; i < n_alpha; ++i) {
      column.clear();
      for (std::size_t b = 0; b < options.replicates; ++b) {
        if (!std::isnan(values[b][r][i])) column.push_back(values[b][r][i]);
      }
      rep.excluded_replicates.push_back(options.replicates - column.size());
      const double sd = sample_std(column);
      rep.replicate_std.push_back(column.empty() ? nan : sd);
      if (column.empty() || rep.classic[i] == 0.0) {
        rep.normalized_std.emplace_back();
      } else {
        rep.normalized_std.emplace_back(sd / rep.classic[i]);
      }
      if (column.empty()) {
        rep.lower.push_back(nan);
        rep.upper.push_back(nan);
        continue;
      }
      for (double& v : column) v -= rep.vstat[i];
      rep.lower.push_back(rep.classic[i] +
                          order_statistic(column, options.alpha_ci / 2.0));
      rep.upper.push_back(rep.classic[i] +
                          order_statistic(column, 1.0 - options.alpha_ci / 2.0));
    }
  }
  return reports;
}

FairnessReport fairness_band(const ScoreCache& cache, Metric metric,
                             Side side, std::span<const double> alphas,
                             const FairnessOptions& options) {
  const Metric metrics[] = {metric};
  const Side sides[] = {side};
  return fairness_bands(cache, metrics, sides, alphas, options).front();
}

}  // namespace uroc
