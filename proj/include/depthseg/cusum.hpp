#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "depthseg/ranking.hpp"

namespace depthseg {

// Standardised rank CUSUM over a subsample of size M:
//   z[m] = M^{-1/2} sum_{i<=m} (R_i - (M+1)/2) / sqrt((M^2 - 1) / 12),  m = 1..M-1.
// `z` is stored 0-based, so z[m - 1] holds the value at m.
struct CusumProfile {
  std::vector<double> z;
  Span span;
  std::size_t argmax_m = 1;  // 1-based, smallest maximiser of |z|
  double max_abs = 0.0;
};

CusumProfile cusum_profile(std::span<const std::uint32_t> ranks, const Span& span);
CusumProfile cusum_profile(const RankVector& ranks);

struct SingleChange {
  std::size_t k = 0;  // global index of the last pre-change observation
  double stat = 0.0;
};

SingleChange single_change_estimate(const CusumProfile& profile);

// P(sup_t |B(t)| > x) for a standard Brownian bridge (Kolmogorov tail).
double sup_bridge_pvalue(double x);

// Upper quantile q with P(sup |B| > q) = p, by bisection on the tail series.
double sup_bridge_quantile(double p);

}  // namespace depthseg
