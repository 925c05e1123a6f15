#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle.hpp"
#include "uroc/error.hpp"
#include "uroc/estimators.hpp"
#include "uroc/fairness.hpp"
#include "uroc/synthetic.hpp"

namespace uroc {
namespace {

using testing::ScoreSheet;

ScoreCache grouped_synthetic(std::uint64_t seed,
                             std::vector<double> sigma = {0.8, 1.0, 1.2, 1.4},
                             std::size_t K = 24, std::size_t n = 4) {
  SynthConfig cfg;
  cfg.identities = K;
  cfg.images_min = cfg.images_max = n;
  cfg.dimension = 8;
  cfg.sigma = std::move(sigma);
  cfg.seed = seed;
  return ScoreCache::build(generate_dataset(cfg),
                           ImpostorPolicy::same_attribute_only);
}

TEST(Metrics, HandValuesForTwoGroups) {
  const std::vector<double> r = {0.02, 0.01};
  EXPECT_NEAR(geometric_mean(r), std::sqrt(0.0002), 1e-12);
  EXPECT_NEAR(max_min_ratio(r), 2.0, 1e-9);
  EXPECT_NEAR(max_geomean_ratio(r), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(log_geomean_sum(r), std::log10(2.0), 1e-9);
  EXPECT_NEAR(gini_coefficient(r), 0.02 / (2.0 * 4.0 * std::sqrt(0.0002)) * 2.0,
              1e-9);
  EXPECT_NEAR(gini_coefficient(r), 0.35355339059327373, 1e-9);
}

TEST(Metrics, AllEqualIsPerfectlyFair) {
  for (double v : {1e-6, 0.013, 0.5, 1.0}) {
    for (std::size_t groups : {2u, 3u, 4u, 7u}) {
      const std::vector<double> r(groups, v);
      EXPECT_EQ(geometric_mean(r), v);
      EXPECT_EQ(max_min_ratio(r), 1.0);
      EXPECT_EQ(max_geomean_ratio(r), 1.0);
      EXPECT_EQ(log_geomean_sum(r), 0.0);
      EXPECT_EQ(gini_coefficient(r), 0.0);
    }
  }
}

TEST(Metrics, SymmetryScalingAndOrdering) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(1e-4, 0.3);
  std::uniform_real_distribution<double> scale(0.1, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> r(2 + trial % 5);
    for (double& x : r) x = unit(rng);
    auto p = r;
    std::shuffle(p.begin(), p.end(), rng);
    const double c = scale(rng);
    auto s = r;
    for (double& x : s) x *= c;
    for (Metric m : kAllMetrics) {
      const double v = fairness_metric(m, r);
      EXPECT_EQ(fairness_metric(m, p), v);
      EXPECT_NEAR(fairness_metric(m, s), v, 1e-12 * std::max(1.0, v));
    }
    EXPECT_LE(max_geomean_ratio(r), max_min_ratio(r) * (1 + 1e-15));
    EXPECT_GE(max_min_ratio(r), 1.0);
    EXPECT_GE(max_geomean_ratio(r), 1.0);
    EXPECT_GE(log_geomean_sum(r), 0.0);
    EXPECT_GT(gini_coefficient(r), 0.0);
  }
}

TEST(Metrics, TwoGroupClosedForms) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(1e-4, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = unit(rng);
    const double b = unit(rng);
    const std::vector<double> r = {a, b};
    EXPECT_NEAR(log_geomean_sum(r), std::abs(std::log10(a / b)), 1e-12);
    EXPECT_NEAR(gini_coefficient(r), std::abs(a - b) / (2.0 * std::sqrt(a * b)),
                1e-12);
    EXPECT_NEAR(max_min_ratio(r), std::max(a, b) / std::min(a, b), 1e-12);
  }
}

TEST(Metrics, UndefinedCases) {
  const std::vector<double> zero = {0.01, 0.0, 0.02};
  try {
    max_min_ratio(zero);
    FAIL() << "expected UndefinedMetricError";
  } catch (const UndefinedMetricError& e) {
    EXPECT_EQ(e.attribute(), 1);
  }
  EXPECT_THROW(geometric_mean(zero), UndefinedMetricError);
  EXPECT_THROW(max_geomean_ratio(zero), UndefinedMetricError);
  EXPECT_THROW(log_geomean_sum(zero), UndefinedMetricError);
  EXPECT_THROW(gini_coefficient(zero), UndefinedMetricError);
  EXPECT_THROW(gini_coefficient(std::vector<double>{0.1}), InputError);
  // One group is perfectly fair.
  const std::vector<double> one = {0.1};
  EXPECT_EQ(fairness_metric(Metric::max_min, one), 1.0);
  EXPECT_EQ(fairness_metric(Metric::max_geomean, one), 1.0);
  EXPECT_EQ(fairness_metric(Metric::log_geomean, one), 0.0);
  EXPECT_EQ(fairness_metric(Metric::gini, one), 0.0);
}

TEST(Threshold, HandValueAndFarBound) {
  const StepCdf g({0.2, 0.4}, {0.5, 1.0}, 2);
  EXPECT_EQ(global_threshold(g, 0.5), 0.2);
  EXPECT_EQ(global_threshold(g, 1e-9), 0.4);
  EXPECT_THROW(global_threshold(g, 0.0), InputError);
  EXPECT_THROW(global_threshold(g, 1.0), InputError);

  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ds = testing::random_dataset(rng, {3, 2, 4, 3}, {}, 3, trial % 2);
    const auto cache = ScoreCache::build(ds, ImpostorPolicy::all_pairs);
    const auto imp = impostor_cdf(cache);
    for (double alpha : default_alpha_grid()) {
      const double t = global_threshold(imp, alpha);
      EXPECT_LE(1.0 - imp(t), alpha + 1e-15);
    }
    // Attained levels give equality.
    for (double c : imp.cumulative()) {
      if (c >= 1.0) continue;
      const double alpha = 1.0 - c;
      if (1.0 - alpha != c) continue;  // 1 - alpha not representable as c
      EXPECT_EQ(1.0 - imp(global_threshold(imp, alpha)), alpha);
    }
  }
}

TEST(GroupRatesTest, SingleAttributeMatchesGlobal) {
  const auto cache = grouped_synthetic(1, {1.0}, 10, 4);
  const auto f = genuine_cdf(cache);
  const auto g = impostor_cdf(cache);
  for (double t : {-0.2, 0.1, 0.3, 0.6, 0.9}) {
    const auto frr = group_rates(cache, Side::frr, t, RateVariant::classic,
                                 ZeroPolicy::strict);
    const auto far = group_rates(cache, Side::far, t, RateVariant::classic,
                                 ZeroPolicy::strict);
    ASSERT_EQ(frr.rates.size(), 1u);
    EXPECT_EQ(frr.rates[0], f(t));
    EXPECT_EQ(far.rates[0], 1.0 - g(t));
  }
}

TEST(GroupRatesTest, VariantsAgreeWhereTheyShould) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cache = grouped_synthetic(100 + trial, {0.7, 1.1, 1.4}, 12, 3 + trial % 3);
    const auto unit = unit_multiplicities(cache.identity_offsets());
    for (double t : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      for (Side side : kAllSides) {
        const auto classic = group_rates(cache, side, t, RateVariant::classic,
                                         ZeroPolicy::strict);
        const auto boot = group_rates(cache, side, t, unit, ZeroPolicy::strict);
        const auto vstat = group_rates(cache, side, t, RateVariant::vstat,
                                       ZeroPolicy::strict);
        EXPECT_EQ(classic.rates, boot.rates);
        for (std::size_t a = 0; a < classic.rates.size(); ++a) {
          if (side == Side::far) {
            EXPECT_EQ(vstat.rates[a], classic.rates[a]);
          } else {
            EXPECT_LE(vstat.rates[a], classic.rates[a]);
          }
        }
      }
    }
  }
}

TEST(GroupRatesTest, ZeroRatesAreFlooredAndFlagged) {
  // Group 0 has every impostor score below 0.5; group 1 straddles it.
  ScoreSheet sheet;
  const std::map<std::int64_t, std::int64_t> attrs = {{1, 0}, {2, 0}, {3, 1}, {4, 1}};
  for (int k = 1; k <= 4; ++k) sheet.genuine(k, 0, 1, 0.9).genuine(k, 0, 2, 0.8).genuine(k, 1, 2, 0.7);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      sheet.impostor(1, i, 2, j, 0.1 * (i + j) / 4.0);
      sheet.impostor(3, i, 4, j, 0.2 * (i + j));
    }
  }
  const auto cache = sheet.build(ImpostorPolicy::same_attribute_only, attrs);
  const auto floored = group_rates(cache, Side::far, 0.5, RateVariant::classic);
  EXPECT_TRUE(floored.floored[0]);
  EXPECT_FALSE(floored.floored[1]);
  EXPECT_EQ(floored.rates[0], 1.0 / 18.0);
  EXPECT_EQ(zero_rate_floor(cache, Side::far, 0), 1.0 / 18.0);
  // FRR: 2 identities with 3 pairs each.
  EXPECT_EQ(zero_rate_floor(cache, Side::frr, 0), 1.0 / 12.0);

  const auto strict = group_rates(cache, Side::far, 0.5, RateVariant::classic,
                                  ZeroPolicy::strict);
  EXPECT_EQ(strict.rates[0], 0.0);
  EXPECT_THROW(max_min_ratio(strict.rates), UndefinedMetricError);

  const std::vector<double> alphas = {0.3};
  FairnessOptions options;
  options.replicates = 20;
  options.zeros = ZeroPolicy::strict;
  EXPECT_THROW(fairness_band(cache, Metric::max_min, Side::frr, alphas, options),
               UndefinedMetricError);
  options.zeros = ZeroPolicy::floor;
  const auto rep = fairness_band(cache, Metric::max_min, Side::frr, alphas, options);
  EXPECT_FALSE(rep.floored_groups[0].empty());
  EXPECT_TRUE(std::isfinite(rep.classic[0]));
}

TEST(FairnessBand, SingleAttributeIsConstant) {
  const auto cache = grouped_synthetic(2, {1.0}, 10, 4);
  FairnessOptions options;
  options.replicates = 30;
  const auto alphas = parse_alpha_grid("0.01,0.1,0.5");
  const auto reports =
      fairness_bands(cache, kAllMetrics, kAllSides, alphas, options);
  ASSERT_EQ(reports.size(), 8u);
  for (const auto& r : reports) {
    const double expected =
        (r.metric == Metric::max_min || r.metric == Metric::max_geomean) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      EXPECT_EQ(r.classic[i], expected);
      EXPECT_EQ(r.lower[i], expected);
      EXPECT_EQ(r.upper[i], expected);
      EXPECT_EQ(r.replicate_std[i], 0.0);
      EXPECT_EQ(r.excluded_replicates[i], 0u);
    }
  }
}

TEST(FairnessBand, MatchesIndependentRecomputation) {
  const auto cache = grouped_synthetic(3);
  const auto alphas = parse_alpha_grid("0.01,0.05,0.2");
  FairnessOptions options;
  options.replicates = 40;
  options.seed = 77;
  options.threads = 3;
  const auto reports =
      fairness_bands(cache, kAllMetrics, kAllSides, alphas, options);
  const auto imp = impostor_cdf(cache);
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const double t = global_threshold(imp, alphas[i]);
      const auto classic = group_rates(cache, r.side, t, RateVariant::classic);
      const auto vstat = group_rates(cache, r.side, t, RateVariant::vstat);
      const double c = fairness_metric(r.metric, classic.rates);
      const double v = fairness_metric(r.metric, vstat.rates);
      EXPECT_EQ(r.classic[i], c);
      EXPECT_EQ(r.vstat[i], v);
      std::vector<double> reps;
      for (std::size_t b = 0; b < options.replicates; ++b) {
        auto rng = replicate_rng(options.seed, b);
        const auto m = resample_multiplicities(rng, cache);
        const double tb = global_threshold(weighted_impostor_cdf(cache, m), alphas[i]);
        reps.push_back(fairness_metric(r.metric, group_rates(cache, r.side, tb, m).rates));
      }
      EXPECT_EQ(r.replicate_std[i], sample_std(reps));
      std::vector<double> gaps;
      for (double x : reps) gaps.push_back(x - v);
      EXPECT_EQ(r.lower[i], c + order_statistic(gaps, 0.025));
      EXPECT_EQ(r.upper[i], c + order_statistic(gaps, 0.975));
      ASSERT_TRUE(r.normalized_std[i].has_value());
      EXPECT_EQ(*r.normalized_std[i], sample_std(reps) / c);
    }
  }
}

TEST(FairnessBand, DeterministicAcrossThreads) {
  const auto cache = grouped_synthetic(4);
  const auto alphas = default_alpha_grid();
  FairnessOptions options;
  options.replicates = 25;
  options.seed = 3;
  const auto a = fairness_bands(cache, kAllMetrics, kAllSides, alphas, options);
  options.threads = 4;
  const auto b = fairness_bands(cache, kAllMetrics, kAllSides, alphas, options);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    EXPECT_EQ(a[r].classic, b[r].classic);
    EXPECT_EQ(a[r].replicate_std, b[r].replicate_std);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      EXPECT_TRUE(a[r].lower[i] == b[r].lower[i] ||
                  (std::isnan(a[r].lower[i]) && std::isnan(b[r].lower[i])));
    }
  }
}

TEST(FairnessBand, ReportInvariants) {
  const auto cache = grouped_synthetic(5);
  FairnessOptions options;
  options.replicates = 50;
  const auto alphas = default_alpha_grid();
  const auto reports =
      fairness_bands(cache, kAllMetrics, kAllSides, alphas, options);
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const double c = r.classic[i];
      switch (r.metric) {
        case Metric::max_min:
        case Metric::max_geomean:
          EXPECT_GE(c, 1.0);
          break;
        case Metric::log_geomean:
        case Metric::gini:
          EXPECT_GE(c, 0.0);
          break;
      }
      if (!std::isnan(r.lower[i])) EXPECT_LE(r.lower[i], r.upper[i]);
    }
  }
}

TEST(Names, RoundTrip) {
  for (Metric m : kAllMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
  for (Side s : kAllSides) EXPECT_EQ(parse_side(to_string(s)), s);
  EXPECT_THROW(parse_metric("theil"), InputError);
  EXPECT_THROW(parse_side("EER"), InputError);
}

}  // namespace
}  // namespace uroc
