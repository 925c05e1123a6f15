#include "uroc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "uroc/error.hpp"
#include "uroc/parallel.hpp"

namespace uroc {

namespace {

// Stream tags keep the derived seeds of unrelated uses apart.
constexpr std::uint64_t kDatasetTag = 0x5eed'da7a;
constexpr std::uint64_t kBootstrapTag = 0x5eed'b007;
constexpr std::uint64_t kOracleBatchTag = 0x5eed'0a1c;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

void normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
}

std::vector<double> random_direction(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> normal;
  std::vector<double> v(d);
  do {
    for (double& x : v) x = normal(rng);
  } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
  normalize(v);
  return v;
}

std::vector<double> perturb(std::mt19937_64& rng,
                            const std::vector<double>& center, double sigma) {
  std::normal_distribution<double> normal;
  const double scale = sigma / std::sqrt(static_cast<double>(center.size()));
  std::vector<double> v(center.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = center[j] + scale * normal(rng);
  }
  normalize(v);
  return v;
}

double dot(const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * v[j];
  return std::clamp(s, -1.0, 1.0);
}

StepCdf empirical_cdf(std::vector<double> scores) {
  std::sort(scores.begin(), scores.end());
  std::vector<double> thresholds;
  std::vector<double> cumulative;
  const auto n = static_cast<double>(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i + 1 < scores.size() && scores[i + 1] == scores[i]) continue;
    thresholds.push_back(scores[i]);
    cumulative.push_back(static_cast<double>(i + 1) / n);
  }
  return StepCdf(std::move(thresholds), std::move(cumulative), n);
}

}  // namespace

void SynthConfig::validate() const {
  if (identities < 2) throw InputError("synthetic config: K must be >= 2");
  if (images_min < 2 || images_max < images_min) {
    throw InputError("synthetic config: need 2 <= n_min <= n_max");
  }
  if (dimension < 2) throw InputError("synthetic config: d must be >= 2");
  if (sigma.empty()) {
    throw InputError("synthetic config: at least one attribute is required");
  }
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InputError("synthetic config: every sigma must be positive");
    }
  }
}

EmbeddingDataset generate_dataset(const SynthConfig& config) {
  config.validate();
  const std::size_t A = config.attribute_count();
  std::vector<RawRecord> records;
  for (std::size_t k = 0; k < config.identities; ++k) {
    auto rng = replicate_rng(config.seed, k);
    std::uniform_int_distribution<std::size_t> count(config.images_min,
                                                     config.images_max);
    const std::size_t n = count(rng);
    const std::size_t attribute = k % A;
    const auto center = random_direction(rng, config.dimension);
    for (std::size_t i = 0; i < n; ++i) {
      const auto image = perturb(rng, center, config.sigma[attribute]);
      RawRecord r;
      r.image_id = std::to_string(k + 1) + "_" + std::to_string(i);
      r.identity = static_cast<std::int64_t>(k + 1);
      r.attribute = static_cast<std::int64_t>(attribute);
      r.embedding.assign(image.begin(), image.end());
      records.push_back(std::move(r));
    }
  }
  return EmbeddingDataset::from_records(std::move(records));
}

OracleRoc oracle_true_roc(const SynthConfig& config, std::size_t mc_pairs,
                          std::span<const double> alphas, std::uint64_t seed,
                          std::optional<int> attribute,
                          ImpostorPolicy policy) {
  config.validate();
  const std::size_t A = config.attribute_count();
  if (attribute && (*attribute < 0 || static_cast<std::size_t>(*attribute) >= A)) {
    throw InputError("oracle: attribute out of range");
  }
  constexpr std::size_t kBatches = 50;
  if (mc_pairs < kBatches) throw InputError("oracle: too few Monte-Carlo pairs");

  // Identities per attribute under round-robin assignment.
  std::vector<double> genuine_weight(A, 0.0);
  std::vector<double> impostor_weight(A, 0.0);
  for (std::size_t a = 0; a < A; ++a) {
    const auto count = static_cast<double>(
        config.identities / A + (a < config.identities % A ? 1 : 0));
    genuine_weight[a] = count;
    impostor_weight[a] = count * (count - 1.0) / 2.0;
  }
  if (attribute) {
    for (std::size_t a = 0; a < A; ++a) {
      if (static_cast<int>(a) != *attribute) {
        genuine_weight[a] = impostor_weight[a] = 0.0;
      }
    }
  }

  const std::size_t d = config.dimension;
  std::vector<double> genuine(mc_pairs);
  std::vector<double> impostor(mc_pairs);
  const std::size_t per_batch = mc_pairs / kBatches;
  for (std::size_t batch = 0; batch < kBatches; ++batch) {
    std::mt19937_64 rng(derive_seed(seed, kOracleBatchTag, batch));
    std::discrete_distribution<std::size_t> pick_genuine(genuine_weight.begin(),
                                                         genuine_weight.end());
    std::discrete_distribution<std::size_t> pick_impostor(
        impostor_weight.begin(), impostor_weight.end());
    std::uniform_int_distribution<std::size_t> pick_identity(
        0, config.identities - 1);
    const std::size_t begin = batch * per_batch;
    const std::size_t end = batch + 1 == kBatches ? mc_pairs : begin + per_batch;
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t a = pick_genuine(rng);
      const auto c = random_direction(rng, d);
      genuine[p] = dot(perturb(rng, c, config.sigma[a]),
                       perturb(rng, c, config.sigma[a]));

      std::size_t a1 = 0;
      std::size_t a2 = 0;
      if (policy == ImpostorPolicy::same_attribute_only || attribute) {
        a1 = a2 = pick_impostor(rng);
      } else {
        const std::size_t k1 = pick_identity(rng);
        std::size_t k2 = k1;
        while (k2 == k1) k2 = pick_identity(rng);
        a1 = k1 % A;
        a2 = k2 % A;
      }
      const auto c1 = random_direction(rng, d);
      const auto c2 = random_direction(rng, d);
      impostor[p] = dot(perturb(rng, c1, config.sigma[a1]),
                        perturb(rng, c2, config.sigma[a2]));
    }
  }

  OracleRoc out;
  out.curve = roc_curve(empirical_cdf(genuine), empirical_cdf(impostor), alphas);

  std::vector<std::vector<double>> batch_values;
  for (std::size_t batch = 0; batch < kBatches; ++batch) {
    const std::size_t begin = batch * per_batch;
    const std::size_t end = batch + 1 == kBatches ? mc_pairs : begin + per_batch;
    std::vector<double> g(genuine.begin() + begin, genuine.begin() + end);
    std::vector<double> i(impostor.begin() + begin, impostor.begin() + end);
    batch_values.push_back(
        roc_curve(empirical_cdf(std::move(g)), empirical_cdf(std::move(i)),
                  alphas)
            .values);
  }
  std::vector<double> column(kBatches);
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    for (std::size_t b = 0; b < kBatches; ++b) column[b] = batch_values[b][j];
    out.standard_error.push_back(sample_std(column) /
                                 std::sqrt(static_cast<double>(kBatches)));
  }
  return out;
}

CoverageResult coverage_experiment(const SynthConfig& config,
                                   const CoverageOptions& options) {
  config.validate();
  if (options.reps < 1) throw InputError("coverage: reps must be positive");
  if (options.replicates < 2) {
    throw InputError("coverage: at least 2 bootstrap replicates are required");
  }
  const OracleRoc truth =
      oracle_true_roc(config, options.mc_pairs, options.alphas,
                      derive_seed(options.seed, kOracleBatchTag, ~0ULL),
                      std::nullopt, options.policy);

  CoverageResult result;
  result.alphas = options.alphas;
  result.truth = truth.curve.values;
  result.truth_se = truth.standard_error;
  result.reps = options.reps;
  result.replicates = options.replicates;
  const std::size_t n_alpha = options.alphas.size();
  result.covered.assign(
      2, std::vector<std::vector<std::uint8_t>>(
                 options.reps, std::vector<std::uint8_t>(n_alpha, 0)));

  parallel_for(options.reps, options.threads, [&](std::size_t r) {
    SynthConfig rep_config = config;
    rep_config.seed = derive_seed(options.seed, kDatasetTag, r);
    const auto ds = generate_dataset(rep_config);
    const auto cache = ScoreCache::build(ds, options.policy);
    const auto reps = bootstrap_roc(cache, options.alphas, options.replicates,
                                    derive_seed(options.seed, kBootstrapTag, r),
                                    1);
    const BandMode modes[] = {BandMode::recentered, BandMode::naive};
    for (std::size_t mode = 0; mode < 2; ++mode) {
      const CurveBand band = make_band(reps, options.alpha_ci, modes[mode]);
      for (std::size_t j = 0; j < n_alpha; ++j) {
        result.covered[mode][r][j] = band.lower[j] <= result.truth[j] &&
                                     result.truth[j] <= band.upper[j];
      }
    }
  });

  for (std::size_t mode = 0; mode < 2; ++mode) {
    auto& rates = mode == 0 ? result.recentered : result.naive;
    for (std::size_t j = 0; j < n_alpha; ++j) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < options.reps; ++r) {
        hits += result.covered[mode][r][j] ? 1 : 0;
      }
      rates.push_back(static_cast<double>(hits) /
                      static_cast<double>(options.reps));
    }
  }
  return result;
}

}  // namespace uroc
