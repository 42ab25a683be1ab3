#include "depthseg/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace depthseg {

RankVector rank_from_depths(const DepthVector& depths) {
  const auto m = depths.values.size();
  if (m == 0) throw Error(ErrorKind::InvalidArgument, "ranking", "cannot rank an empty depth vector");
  const auto& v = depths.values;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

  RankVector out;
  out.span = {1, m};
  out.ranks.resize(m);
  // Walk tie groups from the top; every member gets the group's last position.
  std::size_t hi = m;
  while (hi > 0) {
    std::size_t lo = hi - 1;
    while (lo > 0 && v[order[lo - 1]] == v[order[hi - 1]]) --lo;
    for (std::size_t k = lo; k < hi; ++k) out.ranks[order[k]] = static_cast<std::uint32_t>(hi);
    hi = lo;
  }
  return out;
}

RankVector depth_ranks(const DataMatrix& data, const Span& span, DepthKind kind, const DepthOptions& options) {
  if (span.s < 1 || span.e <= span.s || span.e > data.rows()) {
    throw Error(ErrorKind::InvalidArgument, "ranking",
                "rank span [" + std::to_string(span.s) + ", " + std::to_string(span.e) + "] invalid for N = " +
                    std::to_string(data.rows()));
  }
  const auto block = data.span(span);
  auto out = rank_from_depths(compute_depth(kind, block, block, options));
  out.span = span;
  return out;
}

}  // namespace depthseg
