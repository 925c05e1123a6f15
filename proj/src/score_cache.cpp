#include "uroc/score_cache.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>

#include "uroc/error.hpp"
#include "uroc/text.hpp"

namespace uroc {

std::string_view to_string(ImpostorPolicy policy) {
  return policy == ImpostorPolicy::all_pairs ? "all_pairs"
                                             : "same_attribute_only";
}

ImpostorPolicy parse_impostor_policy(std::string_view name) {
  if (name == "all_pairs") return ImpostorPolicy::all_pairs;
  if (name == "same_attribute_only") return ImpostorPolicy::same_attribute_only;
  throw InputError("unknown impostor policy: " + std::string(name));
}

namespace {

bool retained(ImpostorPolicy policy, int a, int b) {
  return policy == ImpostorPolicy::all_pairs || a == b;
}

void check_policy_feasible(ImpostorPolicy policy,
                           std::span<const int> identity_attributes,
                           std::size_t attribute_count,
                           const auto& attribute_label) {
  if (policy != ImpostorPolicy::same_attribute_only) return;
  std::vector<std::size_t> counts(attribute_count, 0);
  for (int a : identity_attributes) ++counts[static_cast<std::size_t>(a)];
  for (std::size_t a = 0; a < attribute_count; ++a) {
    if (counts[a] < 2) {
      throw InputError("attribute " +
                       std::to_string(attribute_label(static_cast<int>(a))) +
                       " has fewer than 2 identities; no impostor pair is "
                       "definable under same_attribute_only");
    }
  }
}

}  // namespace

std::size_t ScoreCache::attribute_identity_count(int a) const {
  return static_cast<std::size_t>(
      std::count(identity_attributes_.begin(), identity_attributes_.end(), a));
}

ScoreCache ScoreCache::build(const EmbeddingDataset& ds,
                             ImpostorPolicy policy) {
  ScoreCache cache;
  cache.policy_ = policy;
  const auto offsets = ds.identity_offsets();
  cache.offsets_.assign(offsets.begin(), offsets.end());
  const auto attrs = ds.identity_attributes();
  cache.identity_attributes_.assign(attrs.begin(), attrs.end());
  const auto attr_labels = ds.attribute_labels();
  cache.attribute_labels_.assign(attr_labels.begin(), attr_labels.end());
  for (std::size_t k = 0; k < ds.identity_count(); ++k) {
    cache.identity_labels_.push_back(ds.identity_label(k));
  }
  check_policy_feasible(policy, cache.identity_attributes_,
                        cache.attribute_labels_.size(),
                        [&](int a) { return ds.attribute_label(a); });

  const std::size_t n_images = ds.size();
  cache.image_ids_.reserve(n_images);
  cache.self_scores_.reserve(n_images);
  for (std::size_t i = 0; i < n_images; ++i) {
    cache.image_ids_.push_back(ds.image_id(i));
    cache.self_scores_.push_back(
        cosine_similarity(ds.embedding(i), ds.embedding(i)));
  }

  const std::size_t K = ds.identity_count();
  cache.genuine_offsets_.push_back(0);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t begin = offsets[k];
    const std::size_t end = offsets[k + 1];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < end; ++j) {
        cache.genuine_.push_back(
            cosine_similarity(ds.embedding(i), ds.embedding(j)));
      }
    }
    cache.genuine_offsets_.push_back(cache.genuine_.size());
  }

  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = k + 1; l < K; ++l) {
      if (!retained(policy, attrs[k], attrs[l])) continue;
      cache.impostor_blocks_.push_back({static_cast<std::uint32_t>(k),
                                        static_cast<std::uint32_t>(l),
                                        cache.impostor_.size()});
      for (std::size_t i = offsets[k]; i < offsets[k + 1]; ++i) {
        for (std::size_t j = offsets[l]; j < offsets[l + 1]; ++j) {
          cache.impostor_.push_back(
              cosine_similarity(ds.embedding(i), ds.embedding(j)));
        }
      }
    }
  }
  return cache;
}

ScoreCache parse_scores_csv(
    std::string_view csv,
    const std::map<std::int64_t, std::int64_t>& attributes,
    ImpostorPolicy policy) {
  const auto rows = text::lines(csv);
  if (rows.empty()) throw InputError("empty score CSV");
  const auto header = text::split_fields(rows.front().second);
  if (header.size() != 5 || header[0] != "identity_a" ||
      header[1] != "identity_b" || header[2] != "image_a" ||
      header[3] != "image_b" || header[4] != "score") {
    throw InputError(
        "malformed header: expected identity_a,identity_b,image_a,image_b,"
        "score");
  }

  struct Row {
    std::int64_t id_a, id_b;
    std::string img_a, img_b;
    double score;
  };
  std::vector<Row> parsed;
  parsed.reserve(rows.size() - 1);
  // Images per identity, in order of first appearance.
  std::map<std::int64_t, std::vector<std::string>> images;
  std::map<std::int64_t, std::unordered_map<std::string, std::size_t>> local;
  auto note_image = [&](std::int64_t id, const std::string& img) {
    auto& index = local[id];
    if (index.emplace(img, index.size()).second) images[id].push_back(img);
  };
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [number, line] = rows[r];
    const std::string where = "line " + std::to_string(number);
    const auto f = text::split_fields(line);
    if (f.size() != 5) {
      throw InputError("malformed row: " + where + ": expected 5 fields");
    }
    Row row{text::parse_int(f[0], where), text::parse_int(f[1], where),
            std::string(f[2]), std::string(f[3]),
            text::parse_double(f[4], where)};
    if (!std::isfinite(row.score)) {
      throw InputError("malformed row: " + where + ": non-finite score");
    }
    note_image(row.id_a, row.img_a);
    note_image(row.id_b, row.img_b);
    parsed.push_back(std::move(row));
  }

  ScoreCache cache;
  cache.policy_ = policy;
  std::map<std::int64_t, std::size_t> identity_index;
  std::map<std::int64_t, int> attribute_index;
  for (const auto& [label, imgs] : images) {
    if (imgs.size() < 2) {
      throw InputError("identity " + std::to_string(label) +
                       " has fewer than 2 images");
    }
    const auto it = attributes.find(label);
    attribute_index.emplace(it == attributes.end() ? 0 : it->second, 0);
  }
  int next_attr = 0;
  for (auto& [label, index] : attribute_index) {
    index = next_attr++;
    cache.attribute_labels_.push_back(label);
  }
  cache.offsets_.push_back(0);
  for (const auto& [label, imgs] : images) {
    identity_index[label] = cache.identity_labels_.size();
    cache.identity_labels_.push_back(label);
    const auto it = attributes.find(label);
    cache.identity_attributes_.push_back(
        attribute_index.at(it == attributes.end() ? 0 : it->second));
    for (const auto& img : imgs) cache.image_ids_.push_back(img);
    cache.offsets_.push_back(cache.image_ids_.size());
  }
  check_policy_feasible(policy, cache.identity_attributes_,
                        cache.attribute_labels_.size(),
                        [&](int a) { return cache.attribute_label(a); });

  const std::size_t K = cache.identity_labels_.size();
  const double missing = std::nan("");
  std::vector<std::optional<double>> self(cache.image_ids_.size());
  cache.genuine_offsets_.push_back(0);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t n = cache.identity_size(k);
    cache.genuine_.resize(cache.genuine_.size() + n * (n - 1) / 2, missing);
    cache.genuine_offsets_.push_back(cache.genuine_.size());
  }
  // Block index for each retained identity pair.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> block_of;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = k + 1; l < K; ++l) {
      if (!retained(policy, cache.identity_attributes_[k],
                    cache.identity_attributes_[l])) {
        continue;
      }
      block_of[{k, l}] = cache.impostor_blocks_.size();
      cache.impostor_blocks_.push_back({static_cast<std::uint32_t>(k),
                                        static_cast<std::uint32_t>(l),
                                        cache.impostor_.size()});
      cache.impostor_.resize(
          cache.impostor_.size() + cache.identity_size(k) * cache.identity_size(l),
          missing);
    }
  }

  auto duplicate = [](const Row& row) {
    return InputError("duplicate score for pair (" + row.img_a + ", " +
                      row.img_b + ")");
  };
  for (const Row& row : parsed) {
    std::size_t ka = identity_index.at(row.id_a);
    std::size_t kb = identity_index.at(row.id_b);
    std::size_t ia = local.at(row.id_a).at(row.img_a);
    std::size_t ib = local.at(row.id_b).at(row.img_b);
    if (ka == kb) {
      if (ia == ib) {
        auto& slot = self[cache.offsets_[ka] + ia];
        if (slot) throw duplicate(row);
        slot = row.score;
        continue;
      }
      if (ia > ib) std::swap(ia, ib);
      double& slot =
          cache.genuine_[cache.genuine_offsets_[ka] +
                         ScoreCache::pair_index(cache.identity_size(ka), ia,
                                                ib)];
      if (!std::isnan(slot)) throw duplicate(row);
      slot = row.score;
      continue;
    }
    if (ka > kb) {
      std::swap(ka, kb);
      std::swap(ia, ib);
    }
    const auto it = block_of.find({ka, kb});
    if (it == block_of.end()) continue;  // dropped by the policy
    const ImpostorBlock& block = cache.impostor_blocks_[it->second];
    double& slot =
        cache.impostor_[block.offset + ia * cache.identity_size(kb) + ib];
    if (!std::isnan(slot)) throw duplicate(row);
    slot = row.score;
  }

  for (std::size_t k = 0; k < K; ++k) {
    for (double s : cache.genuine(k)) {
      if (std::isnan(s)) {
        throw InputError("missing genuine score for identity " +
                         std::to_string(cache.identity_labels_[k]));
      }
    }
  }
  for (const ImpostorBlock& block : cache.impostor_blocks_) {
    for (double s : cache.impostor(block)) {
      if (std::isnan(s)) {
        throw InputError(
            "missing impostor score between identities " +
            std::to_string(cache.identity_labels_[block.first]) + " and " +
            std::to_string(cache.identity_labels_[block.second]));
      }
    }
  }
  cache.self_scores_.reserve(self.size());
  for (const auto& s : self) cache.self_scores_.push_back(s.value_or(1.0));
  return cache;
}

ScoreCache load_scores(const std::filesystem::path& path,
                       const std::map<std::int64_t, std::int64_t>& attributes,
                       ImpostorPolicy policy) {
  return parse_scores_csv(text::read_file(path), attributes, policy);
}

std::map<std::int64_t, std::int64_t> load_attribute_map(
    const std::filesystem::path& path) {
  const std::string contents = text::read_file(path);
  const auto rows = text::lines(contents);
  if (rows.empty() || rows.front().second != "identity,attribute") {
    throw InputError("malformed header: expected identity,attribute");
  }
  std::map<std::int64_t, std::int64_t> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = "line " + std::to_string(rows[r].first);
    const auto f = text::split_fields(rows[r].second);
    if (f.size() != 2) {
      throw InputError("malformed row: " + where + ": expected 2 fields");
    }
    out[text::parse_int(f[0], where)] = text::parse_int(f[1], where);
  }
  return out;
}

std::string attribute_map_to_csv(const ScoreCache& cache) {
  std::string out = "identity,attribute\n";
  for (std::size_t k = 0; k < cache.identity_count(); ++k) {
    out += std::to_string(cache.identity_label(k)) + ',' +
           std::to_string(cache.attribute_label(cache.identity_attribute(k))) +
           '\n';
  }
  return out;
}

std::string scores_to_csv(const ScoreCache& cache) {
  std::string out = "identity_a,identity_b,image_a,image_b,score\n";
  auto row = [&](std::size_t k, std::size_t l, std::size_t i, std::size_t j,
                 double s) {
    out += std::to_string(cache.identity_label(k));
    out += ',';
    out += std::to_string(cache.identity_label(l));
    out += ',';
    out += cache.image_id(i);
    out += ',';
    out += cache.image_id(j);
    out += ',';
    out += text::format_double(s);
    out += '\n';
  };
  for (std::size_t k = 0; k < cache.identity_count(); ++k) {
    const std::size_t begin = cache.identity_begin(k);
    const std::size_t n = cache.identity_size(k);
    for (std::size_t i = 0; i < n; ++i) {
      row(k, k, begin + i, begin + i, cache.self_score(begin + i));
    }
    const auto g = cache.genuine(k);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        row(k, k, begin + i, begin + j, g[ScoreCache::pair_index(n, i, j)]);
      }
    }
  }
  for (const ImpostorBlock& b : cache.impostor_blocks()) {
    const auto s = cache.impostor(b);
    const std::size_t nk = cache.identity_size(b.first);
    const std::size_t nl = cache.identity_size(b.second);
    for (std::size_t i = 0; i < nk; ++i) {
      for (std::size_t j = 0; j < nl; ++j) {
        row(b.first, b.second, cache.identity_begin(b.first) + i,
            cache.identity_begin(b.second) + j, s[i * nl + j]);
      }
    }
  }
  return out;
}

}  // namespace uroc
