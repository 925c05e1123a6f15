#pragma once

#include <optional>

#include "uroc/score_cache.hpp"
#include "uroc/step_cdf.hpp"

namespace uroc {

// F_N: identities weighted equally, each contributing the fraction of its
// C(n_k, 2) genuine pairs scoring at or below t. With `attribute`, only
// identities of that attribute are averaged. Throws InputError when the
// scope is empty.
StepCdf genuine_cdf(const ScoreCache& cache,
                    std::optional<int> attribute = std::nullopt);

// V-statistic counterpart of genuine_cdf: per identity the mass at t is
// (2 #{i<j : s_ij <= t} + #{i : s_ii <= t}) / n_k^2. This is the
// expectation of a with-replacement bootstrap replicate of F_N.
StepCdf vstat_genuine_cdf(const ScoreCache& cache,
                          std::optional<int> attribute = std::nullopt);

// G_N: retained identity pairs weighted equally, each contributing the
// fraction of its n_k n_l cross scores at or below t. With `attribute`,
// only pairs whose identities both carry it.
StepCdf impostor_cdf(const ScoreCache& cache,
                     std::optional<int> attribute = std::nullopt);

// FRR_a(t) = F^a_N(t) and FAR_a(t) = 1 - G^a_N(t).
double group_frr(const ScoreCache& cache, int attribute, double t);
double group_far(const ScoreCache& cache, int attribute, double t);

}  // namespace uroc
