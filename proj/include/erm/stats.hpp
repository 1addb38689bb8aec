#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace erm {

// Distribution summary used for response times and rebalancing distances.
// Quartiles use linear interpolation between order statistics; variance is
// the sample variance (n - 1 denominator, 0 for n < 2).
struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// p-quantile of an ascending-sorted sample, linear interpolation.
double quantile_sorted(std::span<const double> sorted, double p);

SummaryStats summarize_samples(std::vector<double> samples);

}  // namespace erm
