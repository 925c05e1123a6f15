#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace uroc {

// One image as read from disk, before validation and re-indexing.
struct RawRecord {
  std::string image_id;
  std::int64_t identity = 0;
  std::int64_t attribute = 0;
  std::vector<float> embedding;
};

enum class EmbeddingFormat { csv, binary };

// Embeddings with identity labels and a per-identity sensitive attribute.
//
// Identities and attribute values are re-indexed densely (0-based, in
// ascending order of their original labels). Images are stored grouped by
// identity, preserving file order within each identity, so identity k owns
// the contiguous image range [identity_begin(k), identity_begin(k) + n_k).
//
// Invariants enforced at construction: every identity has at least two
// images, all images of an identity share one attribute value, all
// embeddings share one dimension and have nonzero norm.
class EmbeddingDataset {
 public:
  // Throws InputError when an invariant is violated.
  static EmbeddingDataset from_records(std::vector<RawRecord> records);

  std::size_t size() const { return image_ids_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::size_t identity_count() const { return identity_labels_.size(); }
  std::size_t attribute_count() const { return attribute_labels_.size(); }

  std::span<const float> embedding(std::size_t image) const {
    return {values_.data() + image * dimension_, dimension_};
  }
  const std::string& image_id(std::size_t image) const {
    return image_ids_[image];
  }

  std::size_t identity_begin(std::size_t identity) const {
    return offsets_[identity];
  }
  std::size_t identity_size(std::size_t identity) const {
    return offsets_[identity + 1] - offsets_[identity];
  }
  // K + 1 offsets into the image range.
  std::span<const std::size_t> identity_offsets() const { return offsets_; }

  int identity_attribute(std::size_t identity) const {
    return identity_attributes_[identity];
  }
  std::span<const int> identity_attributes() const {
    return identity_attributes_;
  }

  std::int64_t identity_label(std::size_t identity) const {
    return identity_labels_[identity];
  }
  std::int64_t attribute_label(int attribute) const {
    return attribute_labels_[static_cast<std::size_t>(attribute)];
  }
  std::span<const std::int64_t> attribute_labels() const {
    return attribute_labels_;
  }

  // Records in storage order with original labels.
  std::vector<RawRecord> records() const;

 private:
  std::size_t dimension_ = 0;
  std::vector<float> values_;
  std::vector<std::string> image_ids_;
  std::vector<std::size_t> offsets_;
  std::vector<int> identity_attributes_;
  std::vector<std::int64_t> identity_labels_;
  std::vector<std::int64_t> attribute_labels_;
};

// Cosine similarity, clamped to [-1, 1]. Throws InputError on a zero-norm
// input or a dimension mismatch.
double cosine_similarity(std::span<const float> u, std::span<const float> v);

EmbeddingDataset load_embeddings(const std::filesystem::path& path,
                                 EmbeddingFormat format);
EmbeddingDataset parse_embeddings_csv(std::string_view text);
EmbeddingDataset parse_embeddings_binary(std::span<const std::byte> bytes);

void save_embeddings(const EmbeddingDataset& dataset,
                     const std::filesystem::path& path, EmbeddingFormat format);
std::string embeddings_to_csv(const EmbeddingDataset& dataset);
std::vector<std::byte> embeddings_to_binary(const EmbeddingDataset& dataset);

// Picks the format from the file extension: ".bin" / ".uroc" are binary,
// everything else CSV.
EmbeddingFormat guess_format(const std::filesystem::path& path);

}  // namespace uroc
