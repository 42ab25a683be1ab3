#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "depthseg/types.hpp"

namespace depthseg {

enum class DepthKind { Halfspace, Spatial, Mahalanobis, MahalanobisMCD75 };

std::string_view to_string(DepthKind kind);
std::optional<DepthKind> parse_depth_kind(std::string_view name);

// Sample depth of each evaluated point. Values lie in [0, 1]; `exact` is false
// when halfspace depth was approximated by sampled directions.
struct DepthVector {
  std::vector<double> values;
  DepthKind kind = DepthKind::Mahalanobis;
  bool exact = true;
};

struct RobustLocationScatter {
  Eigen::VectorXd location;
  Eigen::MatrixXd scatter;
  std::vector<bool> support_mask;
};

struct McdOptions {
  double breakdown = 0.25;
  std::uint64_t seed = 0;
  int starts = 500;
  int max_csteps = 50;
  int keep_best = 10;
};

enum class HalfspaceMethod { Auto, Exact, Sampled };

struct HalfspaceOptions {
  // Number of random directions for sampled evaluation; 0 selects 1000 * d.
  std::size_t directions = 0;
  std::uint64_t seed = 0;
  // Auto is exact for d <= 2 and sampled otherwise. Exact requires d <= 2.
  HalfspaceMethod method = HalfspaceMethod::Auto;
};

// Condition-number bound above which a scatter matrix is treated as singular.
inline constexpr double kMaxScatterCondition = 1e12;

// 1 / (1 + Mahalanobis distance^2) using the classical sample mean and
// covariance (denominator M - 1) of `reference`, or the reweighted MCD
// estimates when `robust` is set.
DepthVector mahalanobis_depth(const MatrixView& points, const MatrixView& reference, bool robust,
                              const McdOptions& mcd = {});

// Depth from a precomputed location/scatter pair.
DepthVector mahalanobis_depth(const MatrixView& points, const Eigen::VectorXd& location,
                              const Eigen::MatrixXd& scatter);

// 1 - || mean_j S(x - X_j) || with S(v) = v / |v| and S(0) = 0.
DepthVector spatial_depth(const MatrixView& points, const MatrixView& reference);

// Tukey depth: minimum over directions u of the fraction of reference points
// with X'u <= x'u.
DepthVector halfspace_depth(const MatrixView& points, const MatrixView& reference,
                            const HalfspaceOptions& options = {});

// FAST-MCD search for the h-subset with smallest covariance determinant,
// followed by consistency correction and one reweighting step.
RobustLocationScatter mcd_estimate(const MatrixView& reference, const McdOptions& options = {});

struct DepthOptions {
  HalfspaceOptions halfspace;
  McdOptions mcd;
};

// Depth of every row of `points` with respect to the empirical distribution of
// `reference`, dispatching on `kind`.
DepthVector compute_depth(DepthKind kind, const MatrixView& points, const MatrixView& reference,
                          const DepthOptions& options = {});

}  // namespace depthseg
