#include "uroc/step_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uroc/error.hpp"
#include "uroc/text.hpp"

namespace uroc {

StepCdf::StepCdf(std::vector<double> thresholds, std::vector<double> cumulative,
                 double total_pairs)
    : thresholds_(std::move(thresholds)),
      cumulative_(std::move(cumulative)),
      total_pairs_(total_pairs) {
  if (thresholds_.size() != cumulative_.size()) {
    throw InputError("step CDF: thresholds and cumulative sizes differ");
  }
}

double StepCdf::operator()(double t) const {
  const auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), t);
  if (it == thresholds_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - thresholds_.begin()) - 1];
}

double StepCdf::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) {
    throw InputError("quantile level must lie in (0, 1], got " +
                     text::format_double(u));
  }
  if (thresholds_.empty()) throw InputError("quantile of an empty CDF");
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return thresholds_.back();
  return thresholds_[static_cast<std::size_t>(it - cumulative_.begin())];
}

RocCurve roc_curve(const StepCdf& genuine, const StepCdf& impostor,
                   std::span<const double> alphas) {
  RocCurve roc;
  roc.alphas.assign(alphas.begin(), alphas.end());
  roc.values.reserve(alphas.size());
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw InputError("FAR level must lie in (0, 1), got " +
                       text::format_double(alpha));
    }
    roc.values.push_back(genuine(impostor.quantile(1.0 - alpha)));
  }
  return roc;
}

namespace {

std::vector<double> spaced(bool logarithmic, double lo, double hi,
                           std::size_t count) {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(logarithmic
                      ? std::pow(10.0, std::log10(lo) +
                                           f * (std::log10(hi) - std::log10(lo)))
                      : lo + f * (hi - lo));
  }
  // Pin the endpoints so shared boundaries deduplicate exactly.
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> normalize_grid(std::vector<double> grid) {
  for (double a : grid) {
    if (!(a > 0.0 && a < 1.0)) {
      throw InputError("FAR level must lie in (0, 1), got " +
                       text::format_double(a));
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw InputError("empty FAR grid");
  return grid;
}

}  // namespace

std::vector<double> default_alpha_grid() {
  auto grid = spaced(true, 1e-4, 1e-1, 50);
  const auto linear = spaced(false, 0.1, 0.99, 50);
  grid.insert(grid.end(), linear.begin(), linear.end());
  return normalize_grid(std::move(grid));
}

std::vector<double> parse_alpha_grid(std::string_view spec) {
  if (spec.empty() || spec == "default") return default_alpha_grid();
  std::vector<double> grid;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t plus = spec.find('+', start);
    if (plus == std::string_view::npos) plus = spec.size();
    const std::string_view segment = spec.substr(start, plus - start);
    if (segment.starts_with("log:") || segment.starts_with("lin:")) {
      std::vector<std::string_view> parts;
      std::size_t p = 4;
      while (true) {
        const std::size_t colon = segment.find(':', p);
        parts.push_back(segment.substr(p, colon == std::string_view::npos
                                              ? std::string_view::npos
                                              : colon - p));
        if (colon == std::string_view::npos) break;
        p = colon + 1;
      }
      if (parts.size() != 3) {
        throw InputError("malformed grid segment: " + std::string(segment));
      }
      const double lo = text::parse_double(parts[0], "grid");
      const double hi = text::parse_double(parts[1], "grid");
      const auto count = text::parse_int(parts[2], "grid");
      if (count < 1 || !(lo <= hi)) {
        throw InputError("malformed grid segment: " + std::string(segment));
      }
      const auto values = spaced(segment.starts_with("log:"), lo, hi,
                                 static_cast<std::size_t>(count));
      grid.insert(grid.end(), values.begin(), values.end());
    } else {
      for (std::string_view field : text::split_fields(segment)) {
        grid.push_back(text::parse_double(field, "grid"));
      }
    }
    start = plus + 1;
  }
  return normalize_grid(std::move(grid));
}

}  // namespace uroc
