#include "depthseg/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "depthseg/ranking.hpp"

namespace depthseg {

namespace {

constexpr const char* kModule = "simgen";

double skewness_of_delta(double delta) {
  const double b = delta * std::sqrt(2.0 / std::numbers::pi);
  return (4.0 - std::numbers::pi) / 2.0 * b * b * b / std::pow(1.0 - b * b, 1.5);
}

}  // namespace

std::string_view to_string(Distribution dist) {
  switch (dist) {
    case Distribution::Gaussian: return "gaussian";
    case Distribution::Cauchy: return "cauchy";
    case Distribution::SkewNormal: return "skewnormal";
  }
  return "unknown";
}

std::optional<Distribution> parse_distribution(std::string_view name) {
  if (name == "gaussian" || name == "normal") return Distribution::Gaussian;
  if (name == "cauchy") return Distribution::Cauchy;
  if (name == "skewnormal") return Distribution::SkewNormal;
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  if (n < 2 || d < 1) throw Error(ErrorKind::InvalidArgument, kModule, "scenario needs N >= 2 and d >= 1");
  if (sigma_schedule.size() != change_fractions.size() + 1) {
    throw Error(ErrorKind::InvalidArgument, kModule, "sigma schedule must have one more entry than change fractions");
  }
  for (double s : sigma_schedule) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::InvalidArgument, kModule, "variance multipliers must be positive");
  }
  double prev = 0.0;
  for (double t : change_fractions) {
    if (!(t > prev && t < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, kModule, "change fractions must be strictly increasing in (0, 1)");
    }
    prev = t;
  }
  if (submatrix_b && (*submatrix_b < 1 || *submatrix_b >= d)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "submatrix size b must satisfy 1 <= b < d");
  }
  if (distribution == Distribution::SkewNormal && std::abs(skewness) >= skewness_of_delta(0.999999)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "skewness outside the skew-normal range");
  }
}

std::vector<double> scenario_schedule(int scenario, std::size_t num_changes) {
  static const std::vector<double> first{1.0, 2.5, 4.0, 2.25, 5.0, 1.0};
  static const std::vector<double> second{1.0, 3.0, 5.0, 3.0, 5.0, 1.0};
  const auto& base = scenario == 2 ? second : first;
  if (num_changes + 1 > base.size()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "scenarios define at most 5 change-points");
  }
  return {base.begin(), base.begin() + static_cast<std::ptrdiff_t>(num_changes + 1)};
}

std::vector<double> even_fractions(std::size_t num_changes) {
  std::vector<double> out;
  for (std::size_t i = 1; i <= num_changes; ++i) out.push_back(static_cast<double>(i) / static_cast<double>(num_changes + 1));
  return out;
}

ScenarioSpec make_scenario(int scenario, std::size_t n, std::size_t d, std::size_t num_changes, Distribution dist,
                           std::uint64_t seed, std::optional<std::size_t> b) {
  if (scenario < 1 || scenario > 3) throw Error(ErrorKind::InvalidArgument, kModule, "scenario must be 1, 2 or 3");
  ScenarioSpec spec;
  spec.n = n;
  spec.d = d;
  spec.distribution = dist;
  spec.sigma_schedule = scenario_schedule(scenario == 2 ? 2 : 1, num_changes);
  spec.change_fractions = even_fractions(num_changes);
  spec.seed = seed;
  if (scenario == 3) {
    if (!b) throw Error(ErrorKind::InvalidArgument, kModule, "scenario 3 needs a submatrix size b");
    spec.submatrix_b = b;
  }
  return spec;
}

double skew_normal_delta(double gamma) {
  const double target = std::abs(gamma);
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (skewness_of_delta(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double delta = 0.5 * (lo + hi);
  return gamma < 0.0 ? -delta : delta;
}

std::string_view to_string(CauchyScale scale) {
  return scale == CauchyScale::Variance ? "variance" : "sd";
}

std::optional<CauchyScale> parse_cauchy_scale(std::string_view name) {
  if (name == "sd") return CauchyScale::StdDev;
  if (name == "variance") return CauchyScale::Variance;
  return std::nullopt;
}

LabeledSample generate(const ScenarioSpec& spec) {
  spec.validate();
  LabeledSample out;
  out.spec = spec;
  for (double t : spec.change_fractions) {
    out.true_changes.push_back(static_cast<std::size_t>(std::llround(t * static_cast<double>(spec.n))));
  }
  std::size_t prev = 0;
  for (auto k : out.true_changes) {
    if (k <= prev || k >= spec.n) throw Error(ErrorKind::InvalidArgument, kModule, "change fractions give an empty segment");
    prev = k;
  }

  double gamma = spec.skewness != 0.0 ? spec.skewness : 0.1 / static_cast<double>(spec.d);
  const double delta = spec.distribution == Distribution::SkewNormal ? skew_normal_delta(gamma) : 0.0;
  out.skew_slant = delta;
  const double sn_mean = delta * std::sqrt(2.0 / std::numbers::pi);
  const double sn_sd = std::sqrt(1.0 - 2.0 * delta * delta / std::numbers::pi);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  std::cauchy_distribution<double> cauchy;
  auto draw = [&]() -> double {
    switch (spec.distribution) {
      case Distribution::Gaussian: return normal(rng);
      case Distribution::Cauchy: return cauchy(rng);
      case Distribution::SkewNormal: {
        const double u0 = normal(rng);
        const double u1 = normal(rng);
        return (delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1 - sn_mean) / sn_sd;
      }
    }
    return 0.0;
  };

  const std::size_t scaled = spec.submatrix_b.value_or(spec.d);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.d));
  std::size_t segment = 0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    while (segment < out.true_changes.size() && i + 1 > out.true_changes[segment]) ++segment;
    const double var = spec.sigma_schedule[segment];
    const bool by_variance = spec.distribution == Distribution::Cauchy && spec.cauchy_scale == CauchyScale::Variance;
    const double scale = by_variance ? var : std::sqrt(var);
    for (std::size_t j = 0; j < spec.d; ++j) {
      const double x = draw();
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = j < scaled ? scale * x : x;
    }
  }
  out.data = DataMatrix(std::move(values));
  return out;
}

std::string_view to_string(RankDemo demo) {
  switch (demo) {
    case RankDemo::DiagSubmatrix: return "diag";
    case RankDemo::OffDiagSubmatrix: return "offdiag";
    case RankDemo::Mixed: return "mixed";
    case RankDemo::OffsettingExpContraction: return "offset";
    case RankDemo::Identical: return "identical";
  }
  return "unknown";
}

std::optional<RankDemo> parse_rank_demo(std::string_view name) {
  if (name == "diag") return RankDemo::DiagSubmatrix;
  if (name == "offdiag") return RankDemo::OffDiagSubmatrix;
  if (name == "mixed") return RankDemo::Mixed;
  if (name == "offset") return RankDemo::OffsettingExpContraction;
  if (name == "identical") return RankDemo::Identical;
  return std::nullopt;
}

Eigen::MatrixXd rank_demo_sigma1() {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(6, 6);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) s(i, j) = 0.4;
    }
  }
  s(3, 5) = s(5, 3) = 0.4;
  return s;
}

Eigen::MatrixXd rank_demo_sigma2(RankDemo demo) {
  const Eigen::MatrixXd s1 = rank_demo_sigma1();
  Eigen::MatrixXd s2 = s1;
  switch (demo) {
    case RankDemo::DiagSubmatrix:
      s2.bottomRightCorner(3, 3) *= 2.0;
      break;
    case RankDemo::OffDiagSubmatrix:
      s2(5, 3) = s2(3, 5) = 2.0 * s1(5, 3);
      break;
    case RankDemo::Mixed:
      s2(5, 3) = s2(3, 5) = -s1(5, 3);
      s2(3, 3) = 0.2 * s1(3, 3);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (i != j) s2(i, j) = 2.0 * s1(i, j);
        }
      }
      break;
    case RankDemo::OffsettingExpContraction:
      s2(3, 3) = 0.5 * s1(3, 3);
      s2(5, 5) = 2.0 * s1(5, 5);
      break;
    case RankDemo::Identical:
      break;
  }
  return s2;
}

RankDemoResult rank_demo(RankDemo demo, std::size_t n_per_sample, std::uint64_t seed, DepthKind depth) {
  if (n_per_sample < 100) throw Error(ErrorKind::InvalidArgument, kModule, "rank demo needs at least 100 points per sample");
  const Eigen::MatrixXd l1 = Eigen::LLT<Eigen::MatrixXd>(rank_demo_sigma1()).matrixL();
  const Eigen::MatrixXd l2 = Eigen::LLT<Eigen::MatrixXd>(rank_demo_sigma2(demo)).matrixL();
  const auto n = static_cast<Eigen::Index>(n_per_sample);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd combined(2 * n, 6);
  Eigen::VectorXd z(6);
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) z(j) = normal(rng);
    combined.row(i) = ((i < n ? l1 : l2) * z).transpose();
  }
  const DataMatrix data(std::move(combined));
  DepthOptions opts;
  opts.halfspace.seed = seed;
  opts.mcd.seed = seed;
  const auto ranks = depth_ranks(data, {1, data.rows()}, depth, opts).ranks;
  RankDemoResult out;
  out.sample1.assign(ranks.begin(), ranks.begin() + n);
  out.sample2.assign(ranks.begin() + n, ranks.end());
  return out;
}

RankSumTest rank_sum_test(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "rank-sum test needs two nonempty samples");
  std::map<std::uint32_t, std::pair<std::size_t, std::size_t>> counts;  // value -> (in a, in b)
  for (auto v : a) ++counts[v].first;
  for (auto v : b) ++counts[v].second;
  double w = 0.0;
  double tie_term = 0.0;
  double below = 0.0;
  for (const auto& [value, c] : counts) {
    const double t = static_cast<double>(c.first + c.second);
    const double midrank = below + (t + 1.0) / 2.0;
    w += midrank * static_cast<double>(c.first);
    tie_term += t * t * t - t;
    below += t;
  }
  const double n = n1 + n2;
  const double mean = n1 * (n + 1.0) / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  RankSumTest out;
  if (var <= 0.0) return out;
  out.z = (w - mean) / std::sqrt(var);
  out.pvalue = std::erfc(std::abs(out.z) / std::numbers::sqrt2);
  return out;
}

}  // namespace depthseg
