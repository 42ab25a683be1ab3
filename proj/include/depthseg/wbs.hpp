#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "depthseg/cusum.hpp"
#include "depthseg/detector.hpp"

namespace depthseg {

struct IntervalSet {
  std::vector<Span> intervals;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t min_length = 2;
};

// J intervals drawn uniformly from {(s, e) : 1 <= s < e <= N, e - s + 1 >= min_length}.
IntervalSet sample_intervals(std::size_t n, std::size_t count, std::size_t min_length, std::uint64_t seed);

// 100 * floor(log N).
std::size_t default_interval_count(std::size_t n);

// Rank-based wild binary segmentation with either a fixed threshold or
// information-criterion model selection over the nested threshold path.
ChangePointResult wbs_detect(const DataMatrix& data, const DetectorConfig& config);

// Same recursion over caller-supplied intervals.
ChangePointResult wbs_detect(const DataMatrix& data, const DetectorConfig& config, const IntervalSet& intervals);

struct SicScore {
  double value = 0.0;
  bool degenerate = false;  // within-segment rank variance is zero; value is -inf
};

// (N / 2) log(rank residual variance) + l * (log N)^alpha for the
// segmentation `changes` (sorted last-of-segment indices, 1-based).
SicScore sic_criterion(std::span<const std::uint32_t> ranks, std::span<const std::size_t> changes, double alpha);

// Multiple-testing adjustment of p-values.
std::vector<double> adjust_raw_pvalues(std::span<const double> raw, Adjust method);

// Brownian-bridge tail p-values of CUSUM maxima, then adjusted.
std::vector<double> adjust_pvalues(std::span<const double> stats, Adjust method);

}  // namespace depthseg
