#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uroc/dataset.hpp"
#include "uroc/pair_table.hpp"
#include "uroc/score_cache.hpp"
#include "uroc/step_cdf.hpp"

namespace uroc {

// Per-image resample counts, stored in the cache's image order. Identity k
// owns counts[offsets[k] .. offsets[k+1]) and those counts sum to n_k.
struct MultiplicityVector {
  std::vector<std::uint32_t> counts;
  std::vector<std::size_t> offsets;

  std::span<const std::uint32_t> identity(std::size_t k) const {
    return std::span(counts).subspan(offsets[k], offsets[k + 1] - offsets[k]);
  }
};

// Independent substream `stream` of the root `seed`. Replicate b of every
// bootstrap run uses replicate_rng(seed, b), so results do not depend on
// the order in which replicates are computed.
std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t stream);

// All-ones multiplicities: the original sample.
MultiplicityVector unit_multiplicities(std::span<const std::size_t> offsets);

// For each identity, the histogram of n_k uniform draws with replacement
// from its n_k images. Identities themselves are never resampled.
MultiplicityVector resample_multiplicities(
    std::mt19937_64& rng, std::span<const std::size_t> offsets);
MultiplicityVector resample_multiplicities(std::mt19937_64& rng,
                                           const EmbeddingDataset& dataset);
MultiplicityVector resample_multiplicities(std::mt19937_64& rng,
                                           const ScoreCache& cache);

// F_{N*}: per identity, [sum_{i<j} m_i m_j 1{s_ij <= t} +
// sum_i C(m_i, 2) 1{s_ii <= t}] / C(n_k, 2), averaged over identities.
StepCdf weighted_genuine_cdf(const ScoreCache& cache,
                             const MultiplicityVector& m,
                             std::optional<int> attribute = std::nullopt);
// G_{N*}: per pair (k, l), sum_{i,j} m_i^k m_j^l 1{s <= t} / (n_k n_l),
// averaged over retained pairs.
StepCdf weighted_impostor_cdf(const ScoreCache& cache,
                              const MultiplicityVector& m,
                              std::optional<int> attribute = std::nullopt);

// Genuine and impostor tables of one scope (global or one attribute),
// built once and shared by every replicate.
class RocScope {
 public:
  RocScope(const ScoreCache& cache, std::optional<int> attribute);

  const PairTable& genuine() const { return genuine_; }
  const PairTable& impostor() const { return impostor_; }
  std::optional<int> attribute() const { return attribute_; }

  RocCurve estimate(std::span<const double> alphas) const;
  // F̄_{N*} composed with the original G_N^{-1}(1 - alpha).
  RocCurve vstat_center(std::span<const double> alphas) const;
  RocCurve replicate(const MultiplicityVector& m,
                     std::span<const double> alphas) const;

 private:
  std::optional<int> attribute_;
  PairTable genuine_;
  PairTable impostor_;
};

// F_{N*} o G_{N*}^{-1}(1 - alpha) for the bootstrap sample `m`.
RocCurve bootstrap_roc_replicate(const ScoreCache& cache,
                                 const MultiplicityVector& m,
                                 std::span<const double> alphas,
                                 std::optional<int> attribute = std::nullopt);

enum class BandMode { recentered, naive };

std::string_view to_string(BandMode mode);
BandMode parse_band_mode(std::string_view name);

struct BandOptions {
  std::size_t replicates = 100;  // B
  double alpha_ci = 0.05;
  std::uint64_t seed = 0;
  BandMode mode = BandMode::recentered;
  unsigned threads = 1;
};

// Replicate curves of one bootstrap run plus the two reference curves the
// band constructions need. Both band modes are post-processing of this.
struct RocReplicates {
  std::vector<double> alphas;
  std::vector<double> estimate;      // ROC_N
  std::vector<double> vstat_center;  // F̄_{N*} o G_N^{-1}
  // replicates[b][i] = ROC_{N,(b)}(alphas[i]).
  std::vector<std::vector<double>> replicates;
  std::uint64_t seed = 0;
};

RocReplicates bootstrap_roc(const ScoreCache& cache,
                            std::span<const double> alphas,
                            std::size_t replicates, std::uint64_t seed,
                            unsigned threads,
                            std::optional<int> attribute = std::nullopt);

struct CurveBand {
  std::vector<double> alphas;
  std::vector<double> estimate;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> replicate_std;
  std::size_t replicates = 0;
  double alpha_ci = 0.05;
  std::uint64_t seed = 0;
  BandMode mode = BandMode::recentered;
  std::vector<std::string> warnings;
};

// Recentered mode: bounds are ROC_N + the alpha_ci/2 and 1 - alpha_ci/2
// quantiles of ROC_{N,(b)} - F̄_{N*} o G_N^{-1}. Naive mode: the same
// quantiles of the raw replicates. Bounds are clamped to [0, 1].
CurveBand make_band(const RocReplicates& replicates, double alpha_ci,
                    BandMode mode);

CurveBand roc_confidence_band(const ScoreCache& cache,
                              std::span<const double> alphas,
                              const BandOptions& options,
                              std::optional<int> attribute = std::nullopt);

// replicate_std / reference pointwise; nullopt where the reference is 0.
std::vector<std::optional<double>> std_curve(const CurveBand& band,
                                             const RocCurve& reference);

// q-th quantile of `values`: the element of 1-based rank ceil(q * size)
// after sorting (rank clamped to [1, size]).
double order_statistic(std::vector<double> values, double q);

// Standard deviation with the (size - 1) divisor; 0 for fewer than two
// values.
double sample_std(std::span<const double> values);

// Smallest replicate count for which the alpha_ci/2 tail quantile is not
// simply the sample extreme.
std::size_t minimum_replicates(double alpha_ci);

}  // namespace uroc
