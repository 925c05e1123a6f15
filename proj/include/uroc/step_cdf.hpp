#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace uroc {

// Right-continuous step CDF over a finite set of score thresholds.
//
// `thresholds` are strictly increasing; `cumulative[i]` is the mass at or
// below `thresholds[i]`, nondecreasing with a final value of 1. Below the
// first threshold the CDF is 0.
class StepCdf {
 public:
  StepCdf() = default;
  StepCdf(std::vector<double> thresholds, std::vector<double> cumulative,
          double total_pairs);

  // F(t).
  double operator()(double t) const;

  // inf{t in thresholds : F(t) >= u}. Requires u in (0, 1]; throws
  // InputError otherwise.
  double quantile(double u) const;

  std::span<const double> thresholds() const { return thresholds_; }
  std::span<const double> cumulative() const { return cumulative_; }
  // Number of distinct index pairs behind the statistic.
  double total_pairs() const { return total_pairs_; }
  bool empty() const { return thresholds_.empty(); }

 private:
  std::vector<double> thresholds_;
  std::vector<double> cumulative_;
  double total_pairs_ = 0.0;
};

inline double empirical_quantile(const StepCdf& cdf, double u) {
  return cdf.quantile(u);
}

// FRR as a function of the FAR level: values[i] = F(G^{-1}(1 - alphas[i])).
struct RocCurve {
  std::vector<double> alphas;
  std::vector<double> values;
};

// Throws InputError if a grid value is outside (0, 1).
RocCurve roc_curve(const StepCdf& genuine, const StepCdf& impostor,
                   std::span<const double> alphas);

// 50 log-spaced levels on [1e-4, 1e-1] merged with 50 linear levels on
// [0.1, 0.99]; the shared point 0.1 appears once.
std::vector<double> default_alpha_grid();

// Grid syntax: "default", a comma-separated list of levels, or segments
// "log:lo:hi:count" / "lin:lo:hi:count" joined with '+'. The result is
// sorted and deduplicated; every level must lie in (0, 1).
std::vector<double> parse_alpha_grid(std::string_view spec);

}  // namespace uroc
