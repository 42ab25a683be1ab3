#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "depthseg/detector.hpp"

namespace depthseg {

// O(1) Kruskal-Wallis segment cost from prefix sums of full-sample ranks:
//   c(s+1:e) = -12 (e - s) / (N (N + 1)) * (mean rank of s+1..e - (N + 1) / 2)^2.
class KWSegmentCost {
 public:
  explicit KWSegmentCost(std::span<const std::uint32_t> ranks);

  // 0 <= s < e <= N.
  double operator()(std::size_t s, std::size_t e) const;

  std::size_t size() const noexcept { return n_; }
  const std::vector<double>& prefix_rank_sums() const noexcept { return prefix_; }

 private:
  std::size_t n_ = 0;
  double scale_ = 0.0;
  std::vector<double> prefix_;
};

// Result of the penalised minimisation G(k) = min_s { G(s) + c(s+1:k) + beta },
// G(0) = -beta.
struct PeltSolution {
  std::vector<std::size_t> changes;  // sorted, last-of-segment indices
  std::vector<double> cost_to;       // G(0..N)
  std::vector<std::size_t> backpointer;
  double beta = 0.0;
  double mean_candidates = 0.0;
};

// Pruned exact search. Segments are at least `min_segment` long; values within
// 1e-10 (1 + |G|) of the minimum are ties and go to the smallest s.
PeltSolution pelt_optimize(std::span<const std::uint32_t> ranks, double beta, std::size_t min_segment = 1);

// Unpenalised Kruskal-Wallis H of the groups induced by `changes`:
//   12 / (N (N + 1)) sum_i n_i mean_i^2 - 3 (N + 1).
double kw_statistic(std::span<const std::uint32_t> ranks, std::span<const std::size_t> changes);

// H - beta (l + 1): the penalised objective that the segmentation maximises.
double kw_objective(std::span<const std::uint32_t> ranks, std::span<const std::size_t> changes, double beta);

// C1 * sqrt(N) + C2.
double default_penalty(std::size_t n, double c1 = 0.175, double c2 = 3.74);

ChangePointResult pelt_detect(const DataMatrix& data, const DetectorConfig& config);

}  // namespace depthseg
