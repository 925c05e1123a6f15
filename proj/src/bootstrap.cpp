#include "uroc/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "uroc/error.hpp"
#include "uroc/parallel.hpp"
#include "uroc/text.hpp"

namespace uroc {

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

MultiplicityVector unit_multiplicities(std::span<const std::size_t> offsets) {
  MultiplicityVector m;
  m.offsets.assign(offsets.begin(), offsets.end());
  m.counts.assign(offsets.empty() ? 0 : offsets.back(), 1);
  return m;
}

MultiplicityVector resample_multiplicities(
    std::mt19937_64& rng, std::span<const std::size_t> offsets) {
  MultiplicityVector m;
  m.offsets.assign(offsets.begin(), offsets.end());
  m.counts.assign(offsets.empty() ? 0 : offsets.back(), 0);
  for (std::size_t k = 0; k + 1 < offsets.size(); ++k) {
    const std::size_t n = offsets[k + 1] - offsets[k];
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t draw = 0; draw < n; ++draw) {
      ++m.counts[offsets[k] + pick(rng)];
    }
  }
  return m;
}

MultiplicityVector resample_multiplicities(std::mt19937_64& rng,
                                           const EmbeddingDataset& dataset) {
  return resample_multiplicities(rng, dataset.identity_offsets());
}

MultiplicityVector resample_multiplicities(std::mt19937_64& rng,
                                           const ScoreCache& cache) {
  return resample_multiplicities(rng, cache.identity_offsets());
}

namespace {

void check_multiplicities(const ScoreCache& cache,
                          const MultiplicityVector& m) {
  const auto offsets = cache.identity_offsets();
  if (m.counts.size() != cache.image_count() ||
      !std::equal(offsets.begin(), offsets.end(), m.offsets.begin(),
                  m.offsets.end())) {
    throw InputError("multiplicity vector does not match the score cache");
  }
  for (std::size_t k = 0; k < cache.identity_count(); ++k) {
    std::size_t total = 0;
    for (std::uint32_t c : m.identity(k)) total += c;
    if (total != cache.identity_size(k)) {
      throw InputError("multiplicities of identity " +
                       std::to_string(cache.identity_label(k)) +
                       " do not sum to its image count");
    }
  }
}

}  // namespace

StepCdf weighted_genuine_cdf(const ScoreCache& cache,
                             const MultiplicityVector& m,
                             std::optional<int> attribute) {
  check_multiplicities(cache, m);
  return PairTable::genuine(cache, attribute).resampled(m.counts);
}

StepCdf weighted_impostor_cdf(const ScoreCache& cache,
                              const MultiplicityVector& m,
                              std::optional<int> attribute) {
  check_multiplicities(cache, m);
  return PairTable::impostor(cache, attribute).resampled(m.counts);
}

RocScope::RocScope(const ScoreCache& cache, std::optional<int> attribute)
    : attribute_(attribute),
      genuine_(PairTable::genuine(cache, attribute)),
      impostor_(PairTable::impostor(cache, attribute)) {}

RocCurve RocScope::estimate(std::span<const double> alphas) const {
  return roc_curve(genuine_.u_statistic(), impostor_.u_statistic(), alphas);
}

RocCurve RocScope::vstat_center(std::span<const double> alphas) const {
  return roc_curve(genuine_.v_statistic(), impostor_.u_statistic(), alphas);
}

RocCurve RocScope::replicate(const MultiplicityVector& m,
                             std::span<const double> alphas) const {
  return roc_curve(genuine_.resampled(m.counts), impostor_.resampled(m.counts),
                   alphas);
}

RocCurve bootstrap_roc_replicate(const ScoreCache& cache,
                                 const MultiplicityVector& m,
                                 std::span<const double> alphas,
                                 std::optional<int> attribute) {
  check_multiplicities(cache, m);
  return RocScope(cache, attribute).replicate(m, alphas);
}

std::string_view to_string(BandMode mode) {
  return mode == BandMode::recentered ? "recentered" : "naive";
}

BandMode parse_band_mode(std::string_view name) {
  if (name == "recentered") return BandMode::recentered;
  if (name == "naive") return BandMode::naive;
  throw InputError("unknown band mode: " + std::string(name));
}

RocReplicates bootstrap_roc(const ScoreCache& cache,
                            std::span<const double> alphas,
                            std::size_t replicates, std::uint64_t seed,
                            unsigned threads, std::optional<int> attribute) {
  const RocScope scope(cache, attribute);
  RocReplicates out;
  out.alphas.assign(alphas.begin(), alphas.end());
  out.estimate = scope.estimate(alphas).values;
  out.vstat_center = scope.vstat_center(alphas).values;
  out.seed = seed;
  out.replicates.resize(replicates);
  parallel_for(replicates, threads, [&](std::size_t b) {
    auto rng = replicate_rng(seed, b);
    const auto m = resample_multiplicities(rng, cache);
    out.replicates[b] = scope.replicate(m, alphas).values;
  });
  return out;
}

double order_statistic(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  const auto size = static_cast<double>(values.size());
  // The small offset keeps q * size from rounding just above an integer.
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(q * size - 1e-9));
  rank = std::clamp<std::ptrdiff_t>(rank, 1,
                                    static_cast<std::ptrdiff_t>(values.size()));
  auto nth = values.begin() + (rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::size_t minimum_replicates(double alpha_ci) {
  return static_cast<std::size_t>(std::ceil(2.0 / alpha_ci - 1e-9));
}

CurveBand make_band(const RocReplicates& reps, double alpha_ci,
                    BandMode mode) {
  if (!(alpha_ci > 0.0 && alpha_ci <= 1.0)) {
    throw InputError("alpha_ci must lie in (0, 1], got " +
                     text::format_double(alpha_ci));
  }
  const std::size_t B = reps.replicates.size();
  if (B < 2) throw InputError("at least 2 bootstrap replicates are required");

  CurveBand band;
  band.alphas = reps.alphas;
  band.estimate = reps.estimate;
  band.replicates = B;
  band.alpha_ci = alpha_ci;
  band.seed = reps.seed;
  band.mode = mode;
  if (B < minimum_replicates(alpha_ci)) {
    band.warnings.push_back(
        "B=" + std::to_string(B) + " is below ceil(2/alpha_ci)=" +
        std::to_string(minimum_replicates(alpha_ci)) +
        "; tail quantiles are the sample extremes");
  }

  const std::size_t n = reps.alphas.size();
  std::vector<double> column(B);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < B; ++b) {
      column[b] = reps.replicates[b][i];
    }
    band.replicate_std.push_back(sample_std(column));
    if (mode == BandMode::recentered) {
      for (double& v : column) v -= reps.vstat_center[i];
    }
    double lo = order_statistic(column, alpha_ci / 2.0);
    double hi = order_statistic(column, 1.0 - alpha_ci / 2.0);
    if (mode == BandMode::recentered) {
      lo += reps.estimate[i];
      hi += reps.estimate[i];
    }
    band.lower.push_back(std::clamp(lo, 0.0, 1.0));
    band.upper.push_back(std::clamp(hi, 0.0, 1.0));
  }
  return band;
}

CurveBand roc_confidence_band(const ScoreCache& cache,
                              std::span<const double> alphas,
                              const BandOptions& options,
                              std::optional<int> attribute) {
  if (options.replicates < 2) {
    throw InputError("at least 2 bootstrap replicates are required");
  }
  const auto reps = bootstrap_roc(cache, alphas, options.replicates,
                                  options.seed, options.threads, attribute);
  return make_band(reps, options.alpha_ci, options.mode);
}

std::vector<std::optional<double>> std_curve(const CurveBand& band,
                                             const RocCurve& reference) {
  if (reference.values.size() != band.replicate_std.size()) {
    throw InputError("reference curve does not match the band grid");
  }
  std::vector<std::optional<double>> out;
  out.reserve(band.replicate_std.size());
  for (std::size_t i = 0; i < band.replicate_std.size(); ++i) {
    if (reference.values[i] == 0.0) {
      out.emplace_back();
    } else {
      out.emplace_back(band.replicate_std[i] / reference.values[i]);
    }
  }
  return out;
}

}  // namespace uroc
