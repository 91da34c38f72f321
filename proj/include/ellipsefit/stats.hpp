#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace ellipsefit {

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Percentile by linear interpolation on the sorted sample vector.
inline double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

inline SummaryStats summarize(std::vector<double> samples) {
  SummaryStats s;
  s.n = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  s.mean = mean_of(samples);
  s.median = percentile_sorted(samples, 0.50);
  s.p95 = percentile_sorted(samples, 0.95);
  return s;
}

}  // namespace ellipsefit
