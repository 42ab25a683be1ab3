#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "depthseg/depth.hpp"

namespace depthseg {

enum class Distribution { Gaussian, Cauchy, SkewNormal };

std::string_view to_string(Distribution dist);
std::optional<Distribution> parse_distribution(std::string_view name);

// How a segment's variance multiplier sigma^2 scales Cauchy marginals, which
// have no variance: by sigma (the default) or by sigma^2.
enum class CauchyScale { StdDev, Variance };

std::string_view to_string(CauchyScale scale);
std::optional<CauchyScale> parse_cauchy_scale(std::string_view name);

struct ScenarioSpec {
  std::size_t n = 1000;
  std::size_t d = 3;
  Distribution distribution = Distribution::Gaussian;
  double skewness = 0.0;  // SkewNormal only; 0 selects 0.1 / d
  std::vector<double> sigma_schedule{1.0};
  std::vector<double> change_fractions;
  std::optional<std::size_t> submatrix_b;  // scale only the first b coordinates
  CauchyScale cauchy_scale = CauchyScale::StdDev;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledSample {
  DataMatrix data;
  std::vector<std::size_t> true_changes;  // round(theta_i * N)
  ScenarioSpec spec;
  double skew_slant = 0.0;  // skew-normal delta actually used
};

// Variance multipliers for 1 + l segments of simulation scenario 1 or 2.
std::vector<double> scenario_schedule(int scenario, std::size_t num_changes);

// Evenly spaced fractions i / (l + 1).
std::vector<double> even_fractions(std::size_t num_changes);

// Builds the spec of scenario 1, 2 or 3 (3 = scenario 1's schedule applied to
// the first b coordinates).
ScenarioSpec make_scenario(int scenario, std::size_t n, std::size_t d, std::size_t num_changes,
                           Distribution dist, std::uint64_t seed, std::optional<std::size_t> b = std::nullopt);

LabeledSample generate(const ScenarioSpec& spec);

// Skew-normal slant delta in [0, 1) whose standardised third moment is gamma.
double skew_normal_delta(double gamma);

enum class RankDemo { DiagSubmatrix, OffDiagSubmatrix, Mixed, OffsettingExpContraction, Identical };

std::string_view to_string(RankDemo demo);
std::optional<RankDemo> parse_rank_demo(std::string_view name);

// 6x6 covariance of the first sample and of the second under `demo`.
Eigen::MatrixXd rank_demo_sigma1();
Eigen::MatrixXd rank_demo_sigma2(RankDemo demo);

struct RankDemoResult {
  std::vector<std::uint32_t> sample1;
  std::vector<std::uint32_t> sample2;
};

// Two Gaussian samples of n_per_sample points; ranks come from the depths of
// the combined sample with respect to itself.
RankDemoResult rank_demo(RankDemo demo, std::size_t n_per_sample, std::uint64_t seed,
                         DepthKind depth = DepthKind::Mahalanobis);

struct RankSumTest {
  double z = 0.0;
  double pvalue = 1.0;  // two-sided, normal approximation with tie correction
};

// Wilcoxon-Mann-Whitney rank-sum test of two samples of (possibly tied) scores.
RankSumTest rank_sum_test(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

}  // namespace depthseg
