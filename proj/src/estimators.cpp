#include "uroc/estimators.hpp"

#include "uroc/pair_table.hpp"

namespace uroc {

StepCdf genuine_cdf(const ScoreCache& cache, std::optional<int> attribute) {
  return PairTable::genuine(cache, attribute).u_statistic();
}

StepCdf vstat_genuine_cdf(const ScoreCache& cache,
                          std::optional<int> attribute) {
  return PairTable::genuine(cache, attribute).v_statistic();
}

StepCdf impostor_cdf(const ScoreCache& cache, std::optional<int> attribute) {
  return PairTable::impostor(cache, attribute).u_statistic();
}

double group_frr(const ScoreCache& cache, int attribute, double t) {
  return genuine_cdf(cache, attribute)(t);
}

double group_far(const ScoreCache& cache, int attribute, double t) {
  return 1.0 - impostor_cdf(cache, attribute)(t);
}

}  // namespace uroc
