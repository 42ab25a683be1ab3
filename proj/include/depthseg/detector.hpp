#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "depthseg/depth.hpp"

namespace depthseg {

enum class Adjust { None, Bonferroni, BH };
enum class Selection { FixedThreshold, SIC, Penalty };

std::string_view to_string(Adjust adjust);
std::string_view to_string(Selection selection);
std::optional<Adjust> parse_adjust(std::string_view name);

// Settings shared by both detectors. Zero-valued counts select the defaults
// noted beside them.
struct DetectorConfig {
  DepthKind depth = DepthKind::Mahalanobis;
  std::size_t halfspace_directions = 0;  // 1000 * d
  int mcd_starts = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = hardware concurrency

  // Wild binary segmentation.
  std::size_t intervals = 0;  // 100 * floor(log N)
  std::size_t min_length = 20;
  std::optional<double> threshold;  // fixed T; SIC selection when empty
  double alpha = 0.9;
  std::size_t max_changes = 0;  // min(20, floor(N / (2 * min_length)))
  Adjust adjust = Adjust::Bonferroni;

  // PELT.
  double c1 = 0.175;
  double c2 = 3.74;
  std::optional<double> beta;  // overrides c1 * sqrt(N) + c2
  std::size_t min_segment = 1;

  DepthOptions depth_options() const;
};

struct ChangePoint {
  std::size_t k = 0;  // last index (1-based) of the pre-change segment
  double stat = std::numeric_limits<double>::quiet_NaN();
  Span interval;     // interval whose CUSUM selected k (WBS)
  Span parent_span;  // recursion span (WBS)
  std::size_t recursion_depth = 0;
};

struct SicEntry {
  std::size_t num_changes = 0;
  double value = 0.0;
  bool degenerate = false;
};

struct PeltSummary {
  double beta = 0.0;
  double objective = 0.0;     // penalised Kruskal-Wallis objective, constant included
  double kw_statistic = 0.0;  // unpenalised Kruskal-Wallis H of the segmentation
  double mean_candidates = 0.0;
};

struct ChangePointResult {
  std::vector<ChangePoint> changes;  // strictly increasing k
  std::size_t num_changes = 0;
  Selection selection = Selection::SIC;
  double threshold = 0.0;
  double alpha = 0.0;
  std::vector<SicEntry> sic_trace;
  std::vector<ChangePoint> candidates;  // nested model order (SIC)
  std::vector<double> raw_pvalues;
  std::vector<double> pvalues;  // adjusted, aligned with `changes`
  Adjust adjust = Adjust::None;
  std::optional<PeltSummary> pelt;
  std::vector<std::uint32_t> full_ranks;  // full-sample depth ranks

  std::vector<std::size_t> indices() const;
};

// Derives an independent stream seed from a base seed and a tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace depthseg
