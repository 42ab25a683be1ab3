#pragma once

#include <cstdint>
#include <vector>

#include "depthseg/depth.hpp"

namespace depthseg {

// Centre-outward ranks of a (sub)sample: R_i = #{ j : D(X_j) <= D(X_i) }.
// Ties share the largest count. High rank means deep/central.
struct RankVector {
  std::vector<std::uint32_t> ranks;
  Span span;
};

// Pure counting step. The result's span is [1, M].
RankVector rank_from_depths(const DepthVector& depths);

// Depths of X_s..X_e with respect to exactly {X_s..X_e}, then ranked.
RankVector depth_ranks(const DataMatrix& data, const Span& span, DepthKind kind, const DepthOptions& options = {});

}  // namespace depthseg
