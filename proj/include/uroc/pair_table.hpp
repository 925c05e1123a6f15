#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uroc/score_cache.hpp"
#include "uroc/step_cdf.hpp"

namespace uroc {

// The scores of one estimator scope (genuine or impostor, global or one
// attribute), sorted once so that U-statistic, V-statistic and resampled
// CDFs are each a single linear pass.
//
// Every statistic here has the form
//
//   F(t) = (1 / |groups|) * sum_g count_g(t) / D_g
//
// where a group is an identity (genuine side) or a retained identity pair
// (impostor side), count_g(t) is an integer pair count at or below t, and
// D_g is the group's pair total. When the lcm of the D_g is small enough,
// the sum is carried as one exact integer numerator over |groups| * lcm, so
// each CDF value is the correctly rounded rational. Otherwise per-group
// inverse weights are summed in double precision.
class PairTable {
 public:
  static PairTable genuine(const ScoreCache& cache,
                           std::optional<int> attribute = std::nullopt);
  static PairTable impostor(const ScoreCache& cache,
                            std::optional<int> attribute = std::nullopt);

  bool is_genuine() const { return genuine_; }
  std::size_t group_count() const { return group_count_; }
  std::size_t entry_count() const { return entries_.size(); }

  // Classic U-statistic (no diagonal terms).
  StepCdf u_statistic() const;
  // V-statistic, diagonal terms included; genuine tables only.
  StepCdf v_statistic() const;
  // Statistic of the bootstrap sample described by per-image multiplicities
  // (indexed like the cache's images). A genuine pair (i, j) counts
  // m_i * m_j times, a self-score C(m_i, 2) times, an impostor pair
  // m_i * m_j times.
  StepCdf resampled(std::span<const std::uint32_t> counts) const;

 private:
  struct Entry {
    double score;
    std::uint32_t a;
    std::uint32_t b;  // == a for a self-score
    std::uint32_t group;
  };

  // Normalization for one family of group denominators.
  struct Normalizer {
    bool exact = false;
    std::vector<std::uint64_t> multiplier;  // lcm / D_g
    std::uint64_t total = 0;                // |groups| * lcm
    std::vector<double> weight;             // 1 / (|groups| * D_g)
    double pair_total = 0.0;                // sum_g D_g
  };

  static Normalizer make_normalizer(std::span<const std::uint64_t> denoms);

  template <typename WeightFn>
  StepCdf accumulate(const Normalizer& norm, WeightFn weight) const;

  bool genuine_ = true;
  std::size_t group_count_ = 0;
  std::vector<Entry> entries_;
  Normalizer u_norm_;
  Normalizer v_norm_;
};

}  // namespace uroc
