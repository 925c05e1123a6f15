#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uroc/bootstrap.hpp"
#include "uroc/dataset.hpp"
#include "uroc/score_cache.hpp"
#include "uroc/step_cdf.hpp"

namespace uroc {

// Generative model: identity centers uniform on the unit sphere in R^d;
// identity k carries attribute k mod A; each image is
// normalize(center + (sigma_a / sqrt(d)) * z) with z standard normal, so
// sigma_a is the expected noise norm regardless of d.
struct SynthConfig {
  std::size_t identities = 50;        // K
  std::size_t images_min = 8;         // n_k drawn uniformly in
  std::size_t images_max = 8;         //   [images_min, images_max]
  std::size_t dimension = 16;         // d
  std::vector<double> sigma = {1.0};  // one entry per attribute value
  std::uint64_t seed = 1;

  std::size_t attribute_count() const { return sigma.size(); }
  // Throws InputError unless K >= 2, 2 <= n_min <= n_max, d >= 2 and every
  // sigma is positive.
  void validate() const;
};

// Identity k is generated from its own substream of `seed`, so permuting
// the substreams permutes identities. Identity labels are 1..K, attribute
// labels 0..A-1.
EmbeddingDataset generate_dataset(const SynthConfig& config);

struct OracleRoc {
  RocCurve curve;
  // Batch-means standard error at each level.
  std::vector<double> standard_error;
};

// Monte-Carlo estimate of the population ROC under `config`: `mc_pairs`
// genuine pairs and `mc_pairs` impostor pairs, each drawn from freshly
// sampled identities. Genuine pairs pick an attribute in proportion to its
// identity count, impostor pairs in proportion to its count of
// identity pairs (same_attribute_only) or draw both attributes
// independently (all_pairs). `attribute` restricts both sides to one group.
OracleRoc oracle_true_roc(const SynthConfig& config, std::size_t mc_pairs,
                          std::span<const double> alphas, std::uint64_t seed,
                          std::optional<int> attribute = std::nullopt,
                          ImpostorPolicy policy =
                              ImpostorPolicy::same_attribute_only);

struct CoverageOptions {
  std::size_t reps = 200;
  std::size_t replicates = 200;  // B
  double alpha_ci = 0.05;
  std::vector<double> alphas = {0.05, 0.1, 0.2};
  std::size_t mc_pairs = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  ImpostorPolicy policy = ImpostorPolicy::same_attribute_only;
};

struct CoverageResult {
  std::vector<double> alphas;
  std::vector<double> truth;
  std::vector<double> truth_se;
  std::vector<double> recentered;  // fraction of reps covering the truth
  std::vector<double> naive;
  // covered[mode][rep][alpha], mode 0 = recentered, 1 = naive.
  std::vector<std::vector<std::vector<std::uint8_t>>> covered;
  std::size_t reps = 0;
  std::size_t replicates = 0;
};

// Repetition r regenerates the dataset from substream r of the root seed,
// builds both bands from one shared set of replicates, and records whether
// each contains the oracle ROC.
CoverageResult coverage_experiment(const SynthConfig& config,
                                   const CoverageOptions& options);

}  // namespace uroc
