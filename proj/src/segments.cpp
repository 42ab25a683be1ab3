#include "depthseg/segments.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace depthseg {

std::vector<SegmentSummary> summarize_segments(const DataMatrix& data, std::span<const std::size_t> changes) {
  const auto n = data.rows();
  const auto d = static_cast<Eigen::Index>(data.dim());
  std::vector<Span> spans;
  std::size_t start = 1;
  for (auto k : changes) {
    if (k < start || k >= n) {
      throw Error(ErrorKind::InvalidArgument, "cli", "change index " + std::to_string(k) + " does not split the series");
    }
    spans.push_back({start, k});
    start = k + 1;
  }
  spans.push_back({start, n});

  std::vector<SegmentSummary> out;
  for (const auto& sp : spans) {
    const auto block = data.span(sp);
    SegmentSummary s;
    s.span = sp;
    const auto len = block.rows();
    if (len < 2) {
      s.covariance = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::quiet_NaN());
    } else {
      const Eigen::RowVectorXd mean = block.colwise().mean();
      const Eigen::MatrixXd centred = block.rowwise() - mean;
      s.covariance = centred.transpose() * centred / static_cast<double>(len - 1);
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      s.variances.push_back(s.covariance(j, j));
      std::vector<double> col(block.col(j).begin(), block.col(j).end());
      const auto mid = col.size() / 2;
      std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(mid), col.end());
      double med = col[mid];
      if (col.size() % 2 == 0) med = 0.5 * (med + *std::max_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(mid)));
      s.location.push_back(med);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace depthseg
