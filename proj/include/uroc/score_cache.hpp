#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uroc/dataset.hpp"

namespace uroc {

enum class ImpostorPolicy { all_pairs, same_attribute_only };

std::string_view to_string(ImpostorPolicy policy);
ImpostorPolicy parse_impostor_policy(std::string_view name);

// Cross scores between identities `first` < `second`, stored row-major as
// an n_first x n_second block starting at `offset`.
struct ImpostorBlock {
  std::uint32_t first = 0;
  std::uint32_t second = 0;
  std::size_t offset = 0;
};

// All pairwise similarity scores needed by the estimators, computed once.
//
// Genuine scores of identity k are the C(n_k, 2) values s(i, j), i < j, in
// lexicographic order of (i, j). Self-scores s(i, i) are kept per image.
// Impostor blocks exist for every identity pair retained by the policy.
// The cache is immutable once built.
class ScoreCache {
 public:
  static ScoreCache build(const EmbeddingDataset& dataset,
                          ImpostorPolicy policy);

  std::size_t identity_count() const { return identity_attributes_.size(); }
  std::size_t attribute_count() const { return attribute_labels_.size(); }
  std::size_t image_count() const { return self_scores_.size(); }

  std::size_t identity_begin(std::size_t k) const { return offsets_[k]; }
  std::size_t identity_size(std::size_t k) const {
    return offsets_[k + 1] - offsets_[k];
  }
  std::span<const std::size_t> identity_offsets() const { return offsets_; }
  int identity_attribute(std::size_t k) const {
    return identity_attributes_[k];
  }
  // Number of identities carrying attribute `a`.
  std::size_t attribute_identity_count(int a) const;

  double self_score(std::size_t image) const { return self_scores_[image]; }
  std::span<const double> genuine(std::size_t k) const {
    return std::span(genuine_).subspan(genuine_offsets_[k],
                                       genuine_offsets_[k + 1] -
                                           genuine_offsets_[k]);
  }
  std::span<const ImpostorBlock> impostor_blocks() const {
    return impostor_blocks_;
  }
  std::span<const double> impostor(const ImpostorBlock& block) const {
    return std::span(impostor_).subspan(
        block.offset, identity_size(block.first) * identity_size(block.second));
  }

  std::size_t genuine_score_count() const { return genuine_.size(); }
  std::size_t impostor_score_count() const { return impostor_.size(); }
  ImpostorPolicy policy() const { return policy_; }

  std::int64_t identity_label(std::size_t k) const {
    return identity_labels_[k];
  }
  std::int64_t attribute_label(int a) const {
    return attribute_labels_[static_cast<std::size_t>(a)];
  }
  const std::string& image_id(std::size_t image) const {
    return image_ids_[image];
  }

  // Index of the pair (i, j), i < j, within genuine(k).
  static std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

 private:
  friend ScoreCache parse_scores_csv(std::string_view,
                                     const std::map<std::int64_t,
                                                    std::int64_t>&,
                                     ImpostorPolicy);
  ImpostorPolicy policy_ = ImpostorPolicy::same_attribute_only;
  std::vector<std::size_t> offsets_;
  std::vector<int> identity_attributes_;
  std::vector<std::int64_t> identity_labels_;
  std::vector<std::int64_t> attribute_labels_;
  std::vector<std::string> image_ids_;
  std::vector<double> self_scores_;
  std::vector<double> genuine_;
  std::vector<std::size_t> genuine_offsets_;
  std::vector<ImpostorBlock> impostor_blocks_;
  std::vector<double> impostor_;
};

// Precomputed-score ingestion. Rows are
// `identity_a,identity_b,image_a,image_b,score`; a row is genuine iff the
// identities match, and a genuine row with image_a == image_b is a
// self-score (defaulting to 1 when absent). Every genuine pair and every
// impostor pair retained by the policy must be present exactly once.
// `attributes` maps identity label to attribute label; identities missing
// from it get attribute 0.
ScoreCache parse_scores_csv(std::string_view csv,
                            const std::map<std::int64_t, std::int64_t>&
                                attributes,
                            ImpostorPolicy policy);
ScoreCache load_scores(const std::filesystem::path& path,
                       const std::map<std::int64_t, std::int64_t>& attributes,
                       ImpostorPolicy policy);

// `identity,attribute` CSV.
std::map<std::int64_t, std::int64_t> load_attribute_map(
    const std::filesystem::path& path);
std::string attribute_map_to_csv(const ScoreCache& cache);

// Writes the cache in the precomputed-score format, self-scores included.
std::string scores_to_csv(const ScoreCache& cache);

}  // namespace uroc
