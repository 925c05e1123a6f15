#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "oracle.hpp"
#include "uroc/dataset.hpp"
#include "uroc/error.hpp"
#include "uroc/score_cache.hpp"
#include "uroc/synthetic.hpp"
#include "uroc/text.hpp"

namespace uroc {
namespace {

namespace fs = std::filesystem;

const char* kFiveRows =
    "image_id,identity,attribute,e0,e1,e2,e3\n"
    "a,7,0,1,0,0,0\n"
    "b,7,0,0,1,0,0\n"
    "c,3,1,1,1,0,0\n"
    "d,7,0,0,0,1,0\n"
    "e,3,1,0,0,1,1\n";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "uroc_data_model_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(EmbeddingCsv, ParsesIdentitiesAndSizes) {
  const auto ds = parse_embeddings_csv(kFiveRows);
  EXPECT_EQ(ds.size(), 5u);
  EXPECT_EQ(ds.identity_count(), 2u);
  EXPECT_EQ(ds.dimension(), 4u);
  EXPECT_EQ(ds.attribute_count(), 2u);
  // Dense re-indexing in ascending label order.
  EXPECT_EQ(ds.identity_label(0), 3);
  EXPECT_EQ(ds.identity_label(1), 7);
  EXPECT_EQ(ds.identity_size(0), 2u);
  EXPECT_EQ(ds.identity_size(1), 3u);
  EXPECT_EQ(ds.identity_attribute(0), 1);
  EXPECT_EQ(ds.identity_attribute(1), 0);
  // File order is kept within an identity.
  EXPECT_EQ(ds.image_id(2), "a");
  EXPECT_EQ(ds.image_id(3), "b");
  EXPECT_EQ(ds.image_id(4), "d");
}

TEST(EmbeddingCsv, RejectsInconsistentAttribute) {
  const char* csv =
      "image_id,identity,attribute,e0,e1\n"
      "a,7,0,1,0\n"
      "b,7,1,0,1\n";
  try {
    parse_embeddings_csv(csv);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("inconsistent attribute"),
              std::string::npos);
  }
}

TEST(EmbeddingCsv, RejectsInvalidInput) {
  const std::string header = "image_id,identity,attribute,e0,e1\n";
  // Single image identity.
  EXPECT_THROW(parse_embeddings_csv(header + "a,1,0,1,0\nb,2,0,1,0\nc,2,0,0,1\n"),
               InputError);
  // Zero norm.
  EXPECT_THROW(parse_embeddings_csv(header + "a,1,0,0,0\nb,1,0,1,0\n"),
               InputError);
  // Dimension mismatch.
  EXPECT_THROW(parse_embeddings_csv(header + "a,1,0,1,0,3\nb,1,0,1,0\n"),
               InputError);
  // Malformed number.
  EXPECT_THROW(parse_embeddings_csv(header + "a,1,0,1,x\nb,1,0,1,0\n"),
               InputError);
  // Bad header.
  EXPECT_THROW(parse_embeddings_csv("id,identity,attribute,e0\na,1,0,1\n"),
               InputError);
  EXPECT_THROW(load_embeddings(scratch("does_not_exist.csv"),
                               EmbeddingFormat::csv),
               InputError);
}

TEST(EmbeddingBinary, RoundTripIsBitIdentical) {
  SynthConfig cfg;
  cfg.identities = 7;
  cfg.images_min = 2;
  cfg.images_max = 5;
  cfg.dimension = 9;
  cfg.sigma = {0.5, 1.5};
  cfg.seed = 42;
  const auto ds = generate_dataset(cfg);
  const auto path = scratch("roundtrip.bin");
  save_embeddings(ds, path, EmbeddingFormat::binary);
  const auto back = load_embeddings(path, EmbeddingFormat::binary);

  const auto a = ds.records();
  const auto b = back.records();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].image_id, b[i].image_id);
    EXPECT_EQ(a[i].identity, b[i].identity);
    EXPECT_EQ(a[i].attribute, b[i].attribute);
    ASSERT_EQ(a[i].embedding.size(), b[i].embedding.size());
    EXPECT_EQ(std::memcmp(a[i].embedding.data(), b[i].embedding.data(),
                          a[i].embedding.size() * sizeof(float)),
              0);
  }
  EXPECT_EQ(embeddings_to_binary(ds), embeddings_to_binary(back));
}

TEST(EmbeddingBinary, RejectsTruncatedAndTrailingBytes) {
  const auto ds = parse_embeddings_csv(kFiveRows);
  auto bytes = embeddings_to_binary(ds);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(parse_embeddings_binary(truncated), InputError);
  auto trailing = bytes;
  trailing.push_back(std::byte{0});
  EXPECT_THROW(parse_embeddings_binary(trailing), InputError);
  bytes[0] = std::byte{'X'};
  EXPECT_THROW(parse_embeddings_binary(bytes), InputError);
}

TEST(EmbeddingCsv, RoundTripPreservesFloats) {
  SynthConfig cfg;
  cfg.identities = 4;
  cfg.images_min = cfg.images_max = 3;
  cfg.dimension = 5;
  const auto ds = generate_dataset(cfg);
  const auto back = parse_embeddings_csv(embeddings_to_csv(ds));
  EXPECT_EQ(embeddings_to_binary(ds), embeddings_to_binary(back));
}

TEST(CosineSimilarity, HandValues) {
  const float e1[] = {1, 0, 0};
  EXPECT_EQ(cosine_similarity(e1, e1), 1.0);
  const float u[] = {1, 0};
  const float v[] = {0, 1};
  EXPECT_EQ(cosine_similarity(u, v), 0.0);
  const float w[] = {1, 1};
  EXPECT_NEAR(cosine_similarity(w, u), 1.0 / std::sqrt(2.0), 1e-15);
  const float z[] = {0, 0};
  EXPECT_THROW(cosine_similarity(z, u), InputError);
}

TEST(CosineSimilarity, SelfScoreIsExactlyOne) {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> normal(0.0f, 3.0f);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<float> x(1 + trial % 37);
    for (float& c : x) c = normal(rng);
    if (std::all_of(x.begin(), x.end(), [](float c) { return c == 0; })) continue;
    ASSERT_EQ(cosine_similarity(x, x), 1.0);
  }
}

TEST(ScoreCache, CountsUnderAllPairs) {
  const char* csv =
      "image_id,identity,attribute,e0,e1\n"
      "a,1,0,1,0\nb,1,0,0,1\nc,1,0,1,1\n"
      "d,2,0,1,2\ne,2,0,2,1\n";
  const auto cache =
      ScoreCache::build(parse_embeddings_csv(csv), ImpostorPolicy::all_pairs);
  EXPECT_EQ(cache.genuine_score_count(), 4u);
  EXPECT_EQ(cache.impostor_score_count(), 6u);
  EXPECT_EQ(cache.image_count(), 5u);
}

TEST(ScoreCache, SameAttributeFilter) {
  const char* csv =
      "image_id,identity,attribute,e0,e1\n"
      "a,1,0,1,0\nb,1,0,0,1\n"
      "c,2,0,1,1\nd,2,0,1,2\n"
      "e,3,1,2,1\nf,3,1,1,3\n"
      "g,4,1,3,1\nh,4,1,1,1\n";
  const auto ds = parse_embeddings_csv(csv);
  const auto cache = ScoreCache::build(ds, ImpostorPolicy::same_attribute_only);
  ASSERT_EQ(cache.impostor_blocks().size(), 2u);
  EXPECT_EQ(cache.impostor_blocks()[0].first, 0u);
  EXPECT_EQ(cache.impostor_blocks()[0].second, 1u);
  EXPECT_EQ(cache.impostor_blocks()[1].first, 2u);
  EXPECT_EQ(cache.impostor_blocks()[1].second, 3u);

  // Attributes (0, 0, 1): attribute 1 has a single identity.
  const char* lonely =
      "image_id,identity,attribute,e0,e1\n"
      "a,1,0,1,0\nb,1,0,0,1\n"
      "c,2,0,1,1\nd,2,0,1,2\n"
      "e,3,1,2,1\nf,3,1,1,3\n";
  const auto ds3 = parse_embeddings_csv(lonely);
  EXPECT_THROW(ScoreCache::build(ds3, ImpostorPolicy::same_attribute_only),
               InputError);
  const auto all = ScoreCache::build(ds3, ImpostorPolicy::all_pairs);
  EXPECT_EQ(all.impostor_blocks().size(), 3u);
}

TEST(ScoreCache, MatchesDirectCosineForEveryPair) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = testing::random_dataset(rng, {2, 3, 4, 5}, {0, 1, 0, 1}, 6,
                                            trial % 2 == 0);
    for (auto policy :
         {ImpostorPolicy::all_pairs, ImpostorPolicy::same_attribute_only}) {
      const auto cache = ScoreCache::build(ds, policy);
      std::size_t expected_genuine = 0;
      for (std::size_t k = 0; k < ds.identity_count(); ++k) {
        const std::size_t n = ds.identity_size(k);
        const std::size_t b = ds.identity_begin(k);
        expected_genuine += n * (n - 1) / 2;
        const auto g = cache.genuine(k);
        for (std::size_t i = 0; i < n; ++i) {
          EXPECT_EQ(cache.self_score(b + i),
                    cosine_similarity(ds.embedding(b + i), ds.embedding(b + i)));
          for (std::size_t j = i + 1; j < n; ++j) {
            EXPECT_EQ(g[ScoreCache::pair_index(n, i, j)],
                      cosine_similarity(ds.embedding(b + i),
                                        ds.embedding(b + j)));
          }
        }
      }
      EXPECT_EQ(cache.genuine_score_count(), expected_genuine);

      std::size_t expected_impostor = 0;
      std::size_t block = 0;
      for (std::size_t k = 0; k < ds.identity_count(); ++k) {
        for (std::size_t l = k + 1; l < ds.identity_count(); ++l) {
          if (policy == ImpostorPolicy::same_attribute_only &&
              ds.identity_attribute(k) != ds.identity_attribute(l)) {
            continue;
          }
          const auto& bl = cache.impostor_blocks()[block++];
          ASSERT_EQ(bl.first, k);
          ASSERT_EQ(bl.second, l);
          const auto s = cache.impostor(bl);
          const std::size_t nl = ds.identity_size(l);
          for (std::size_t i = 0; i < ds.identity_size(k); ++i) {
            for (std::size_t j = 0; j < nl; ++j) {
              EXPECT_EQ(s[i * nl + j],
                        cosine_similarity(
                            ds.embedding(ds.identity_begin(k) + i),
                            ds.embedding(ds.identity_begin(l) + j)));
            }
          }
          expected_impostor += ds.identity_size(k) * nl;
        }
      }
      EXPECT_EQ(block, cache.impostor_blocks().size());
      EXPECT_EQ(cache.impostor_score_count(), expected_impostor);
    }
  }
}

TEST(ScoreCache, IsAPureFunctionOfTheDataset) {
  SynthConfig cfg;
  cfg.identities = 9;
  cfg.sigma = {0.8, 1.2, 1.0};
  const auto ds = generate_dataset(cfg);
  const auto a = ScoreCache::build(ds, ImpostorPolicy::same_attribute_only);
  const auto b = ScoreCache::build(ds, ImpostorPolicy::same_attribute_only);
  EXPECT_EQ(scores_to_csv(a), scores_to_csv(b));
}

TEST(ScoreFile, RoundTripThroughCsv) {
  SynthConfig cfg;
  cfg.identities = 6;
  cfg.images_min = 2;
  cfg.images_max = 4;
  cfg.sigma = {0.8, 1.2};
  const auto ds = generate_dataset(cfg);
  for (auto policy :
       {ImpostorPolicy::all_pairs, ImpostorPolicy::same_attribute_only}) {
    const auto cache = ScoreCache::build(ds, policy);
    const auto map_path = scratch("attrs.csv");
    text::write_file(map_path, attribute_map_to_csv(cache));
    const auto back =
        parse_scores_csv(scores_to_csv(cache), load_attribute_map(map_path),
                         policy);
    ASSERT_EQ(back.identity_count(), cache.identity_count());
    ASSERT_EQ(back.image_count(), cache.image_count());
    EXPECT_EQ(scores_to_csv(back), scores_to_csv(cache));
    for (std::size_t k = 0; k < cache.identity_count(); ++k) {
      EXPECT_EQ(back.identity_attribute(k), cache.identity_attribute(k));
      const auto g1 = cache.genuine(k);
      const auto g2 = back.genuine(k);
      ASSERT_EQ(g1.size(), g2.size());
      for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_EQ(g1[i], g2[i]);
    }
  }
}

TEST(ScoreFile, ValidatesPairs) {
  using testing::ScoreSheet;
  // Missing genuine pair (1_0, 1_2).
  ScoreSheet missing;
  missing.genuine(1, 0, 1, 0.9).genuine(1, 1, 2, 0.5).genuine(2, 0, 1, 0.4);
  missing.impostor(1, 0, 2, 0, 0.1).impostor(1, 1, 2, 0, 0.1)
      .impostor(1, 2, 2, 0, 0.1).impostor(1, 0, 2, 1, 0.1)
      .impostor(1, 1, 2, 1, 0.1).impostor(1, 2, 2, 1, 0.1);
  EXPECT_THROW(missing.build(), InputError);

  ScoreSheet duplicate;
  duplicate.genuine(1, 0, 1, 0.9).genuine(1, 1, 0, 0.8);
  EXPECT_THROW(duplicate.build(), InputError);

  ScoreSheet ok;
  ok.genuine(1, 0, 1, 0.9).genuine(2, 0, 1, 0.4);
  ok.impostor(1, 0, 2, 0, 0.1).impostor(1, 1, 2, 0, 0.2)
      .impostor(1, 0, 2, 1, 0.3).impostor(1, 1, 2, 1, 0.4);
  const auto cache = ok.build();
  EXPECT_EQ(cache.self_score(0), 1.0);
  ASSERT_EQ(cache.impostor_blocks().size(), 1u);
  const auto s = cache.impostor(cache.impostor_blocks()[0]);
  EXPECT_EQ(s[0], 0.1);
  EXPECT_EQ(s[1], 0.3);
  EXPECT_EQ(s[2], 0.2);
  EXPECT_EQ(s[3], 0.4);
}

}  // namespace
}  // namespace uroc
