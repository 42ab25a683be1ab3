#pragma once

#include <span>
#include <vector>

#include "depthseg/types.hpp"

namespace depthseg {

// Classical second-moment summary of one segment. Variances and covariances
// use denominator n - 1 and are NaN when the segment has a single row.
struct SegmentSummary {
  Span span;
  std::vector<double> variances;
  Eigen::MatrixXd covariance;
  std::vector<double> location;  // coordinate-wise median
};

std::vector<SegmentSummary> summarize_segments(const DataMatrix& data, std::span<const std::size_t> changes);

}  // namespace depthseg
