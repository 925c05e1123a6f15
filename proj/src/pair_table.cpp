#include "uroc/pair_table.hpp"

#include <algorithm>
#include <numeric>

#include "uroc/error.hpp"

namespace uroc {

namespace {

// Largest integer magnitude a double represents exactly.
constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;

bool in_scope(std::optional<int> attribute, int value) {
  return !attribute || *attribute == value;
}

}  // namespace

PairTable::Normalizer PairTable::make_normalizer(
    std::span<const std::uint64_t> denoms) {
  Normalizer norm;
  const auto groups = static_cast<std::uint64_t>(denoms.size());
  std::uint64_t lcm = 1;
  bool fits = true;
  for (std::uint64_t d : denoms) {
    norm.pair_total += static_cast<double>(d);
    if (!fits) continue;
    const std::uint64_t g = std::gcd(lcm, d);
    const std::uint64_t step = lcm / g;
    if (step > kExactLimit / groups / d) {
      fits = false;
      continue;
    }
    lcm = step * d;
  }
  norm.exact = fits;
  if (fits) {
    norm.total = lcm * groups;
    norm.multiplier.reserve(denoms.size());
    for (std::uint64_t d : denoms) norm.multiplier.push_back(lcm / d);
  } else {
    norm.weight.reserve(denoms.size());
    for (std::uint64_t d : denoms) {
      norm.weight.push_back(1.0 / (static_cast<double>(d) *
                                   static_cast<double>(groups)));
    }
  }
  return norm;
}

PairTable PairTable::genuine(const ScoreCache& cache,
                             std::optional<int> attribute) {
  PairTable table;
  table.genuine_ = true;
  std::vector<std::uint64_t> u_denoms;
  std::vector<std::uint64_t> v_denoms;
  for (std::size_t k = 0; k < cache.identity_count(); ++k) {
    if (!in_scope(attribute, cache.identity_attribute(k))) continue;
    const auto group = static_cast<std::uint32_t>(u_denoms.size());
    const std::size_t n = cache.identity_size(k);
    const std::size_t begin = cache.identity_begin(k);
    u_denoms.push_back(n * (n - 1) / 2);
    v_denoms.push_back(n * n);
    const auto scores = cache.genuine(k);
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = static_cast<std::uint32_t>(begin + i);
      table.entries_.push_back({cache.self_score(begin + i), a, a, group});
      for (std::size_t j = i + 1; j < n; ++j) {
        table.entries_.push_back(
            {scores[ScoreCache::pair_index(n, i, j)], a,
             static_cast<std::uint32_t>(begin + j), group});
      }
    }
  }
  if (u_denoms.empty()) {
    throw InputError("no identity in scope for the genuine CDF");
  }
  table.group_count_ = u_denoms.size();
  table.u_norm_ = make_normalizer(u_denoms);
  table.v_norm_ = make_normalizer(v_denoms);
  std::stable_sort(
      table.entries_.begin(), table.entries_.end(),
      [](const Entry& x, const Entry& y) { return x.score < y.score; });
  return table;
}

PairTable PairTable::impostor(const ScoreCache& cache,
                              std::optional<int> attribute) {
  PairTable table;
  table.genuine_ = false;
  std::vector<std::uint64_t> denoms;
  for (const ImpostorBlock& block : cache.impostor_blocks()) {
    const int a1 = cache.identity_attribute(block.first);
    const int a2 = cache.identity_attribute(block.second);
    if (attribute && (a1 != *attribute || a2 != *attribute)) continue;
    const auto group = static_cast<std::uint32_t>(denoms.size());
    const std::size_t nk = cache.identity_size(block.first);
    const std::size_t nl = cache.identity_size(block.second);
    denoms.push_back(nk * nl);
    const std::size_t bk = cache.identity_begin(block.first);
    const std::size_t bl = cache.identity_begin(block.second);
    const auto scores = cache.impostor(block);
    for (std::size_t i = 0; i < nk; ++i) {
      for (std::size_t j = 0; j < nl; ++j) {
        table.entries_.push_back({scores[i * nl + j],
                                  static_cast<std::uint32_t>(bk + i),
                                  static_cast<std::uint32_t>(bl + j), group});
      }
    }
  }
  if (denoms.empty()) {
    throw InputError("no impostor identity pair in scope for the impostor CDF");
  }
  table.group_count_ = denoms.size();
  table.u_norm_ = make_normalizer(denoms);
  std::stable_sort(
      table.entries_.begin(), table.entries_.end(),
      [](const Entry& x, const Entry& y) { return x.score < y.score; });
  return table;
}

template <typename WeightFn>
StepCdf PairTable::accumulate(const Normalizer& norm, WeightFn weight) const {
  std::vector<double> thresholds;
  std::vector<double> cumulative;
  const std::size_t n = entries_.size();
  if (norm.exact) {
    const double total = static_cast<double>(norm.total);
    std::uint64_t numerator = 0;
    std::uint64_t last = 0;
    for (std::size_t e = 0; e < n;) {
      const double score = entries_[e].score;
      for (; e < n && entries_[e].score == score; ++e) {
        numerator += weight(entries_[e]) * norm.multiplier[entries_[e].group];
      }
      if (numerator != last) {
        thresholds.push_back(score);
        cumulative.push_back(static_cast<double>(numerator) / total);
        last = numerator;
      }
    }
    if (numerator != norm.total) {
      throw InputError("step CDF mass does not sum to one");
    }
  } else {
    double sum = 0.0;
    double last = 0.0;
    for (std::size_t e = 0; e < n;) {
      const double score = entries_[e].score;
      for (; e < n && entries_[e].score == score; ++e) {
        const std::uint64_t w = weight(entries_[e]);
        if (w != 0) sum += static_cast<double>(w) * norm.weight[entries_[e].group];
      }
      if (sum != last) {
        thresholds.push_back(score);
        cumulative.push_back(sum);
        last = sum;
      }
    }
    for (double& c : cumulative) c = std::min(1.0, c / sum);
    if (!cumulative.empty()) cumulative.back() = 1.0;
  }
  return StepCdf(std::move(thresholds), std::move(cumulative),
                 norm.pair_total);
}

StepCdf PairTable::u_statistic() const {
  return accumulate(u_norm_, [](const Entry& e) -> std::uint64_t {
    return e.a == e.b ? 0 : 1;
  });
}

StepCdf PairTable::v_statistic() const {
  if (!genuine_) {
    throw InputError("the V-statistic is defined for genuine tables only");
  }
  return accumulate(v_norm_, [](const Entry& e) -> std::uint64_t {
    return e.a == e.b ? 1 : 2;
  });
}

StepCdf PairTable::resampled(std::span<const std::uint32_t> counts) const {
  return accumulate(u_norm_, [counts](const Entry& e) -> std::uint64_t {
    const std::uint64_t ma = counts[e.a];
    if (e.a == e.b) return ma * (ma - (ma > 0 ? 1 : 0)) / 2;
    return ma * counts[e.b];
  });
}

}  // namespace uroc
