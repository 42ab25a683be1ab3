#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "doctest.h"
#include "depthseg/simgen.hpp"

using namespace depthseg;

namespace {

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST_CASE("generate: single Gaussian segment has identity covariance") {
  ScenarioSpec spec;
  spec.n = 100000;
  spec.d = 2;
  spec.seed = 1;
  const auto s = generate(spec);
  CHECK(s.true_changes.empty());
  CHECK((covariance(s.data.values()) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("generate: scenario schedules and change locations") {
  const auto spec = make_scenario(1, 1000, 3, 2, Distribution::Gaussian, 5);
  CHECK(spec.sigma_schedule == std::vector<double>{1.0, 2.5, 4.0});
  CHECK(scenario_schedule(1, 5) == std::vector<double>{1.0, 2.5, 4.0, 2.25, 5.0, 1.0});
  CHECK(scenario_schedule(2, 5) == std::vector<double>{1.0, 3.0, 5.0, 3.0, 5.0, 1.0});
  CHECK_THROWS_AS(scenario_schedule(1, 6), Error);
  CHECK(generate(spec).true_changes == std::vector<std::size_t>{333, 667});
  CHECK(generate(make_scenario(2, 1200, 2, 5, Distribution::Gaussian, 1)).true_changes ==
        std::vector<std::size_t>{200, 400, 600, 800, 1000});
}

TEST_CASE("generate: per-segment variances follow the schedule") {
  auto spec = make_scenario(1, 60000, 3, 2, Distribution::Gaussian, 2);
  const auto s = generate(spec);
  const auto& x = s.data.values();
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> segs{{0, 20000}, {20000, 20000}, {40000, 20000}};
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::MatrixXd seg = x.middleRows(segs[k].first, segs[k].second);
    const auto cov = covariance(seg);
    for (int j = 0; j < 3; ++j) CHECK(cov(j, j) == doctest::Approx(spec.sigma_schedule[k]).epsilon(0.05));
    // Mean zero at 5 sigma.
    for (int j = 0; j < 3; ++j) CHECK(std::abs(seg.col(j).mean()) < 5.0 * std::sqrt(spec.sigma_schedule[k] / 20000.0));
  }
}

TEST_CASE("generate: scenario 3 scales only the first b coordinates") {
  const auto s = generate(make_scenario(3, 60000, 5, 2, Distribution::Gaussian, 3, 2));
  const Eigen::MatrixXd last = s.data.values().bottomRows(20000);
  const auto cov = covariance(last);
  CHECK(cov(0, 0) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(cov(1, 1) == doctest::Approx(4.0).epsilon(0.05));
  for (int j = 2; j < 5; ++j) CHECK(cov(j, j) == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(make_scenario(3, 100, 5, 2, Distribution::Gaussian, 3), Error);
  CHECK_THROWS_AS(generate(make_scenario(3, 100, 5, 2, Distribution::Gaussian, 3, 5)), Error);
}

TEST_CASE("generate: skew-normal marginals") {
  for (double gamma : {0.1 / 3.0, 0.3, 0.9}) {
    const double delta = skew_normal_delta(gamma);
    const double b = delta * std::sqrt(2.0 / std::numbers::pi);
    CHECK((4.0 - std::numbers::pi) / 2.0 * std::pow(b * b / (1.0 - b * b), 1.5) == doctest::Approx(gamma).epsilon(1e-9));
  }
  CHECK(skew_normal_delta(0.0) == doctest::Approx(0.0));
  CHECK(skew_normal_delta(-0.3) == doctest::Approx(-skew_normal_delta(0.3)));

  ScenarioSpec spec;
  spec.n = 200000;
  spec.d = 1;
  spec.distribution = Distribution::SkewNormal;
  spec.skewness = 0.5;
  spec.seed = 4;
  const auto s = generate(spec);
  const Eigen::VectorXd x = s.data.values().col(0);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  const double skew = (x.array() - mean).cube().mean() / std::pow(var, 1.5);
  CHECK(std::abs(mean) < 5.0 / std::sqrt(200000.0));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  CHECK(skew == doctest::Approx(0.5).epsilon(0.1));
  CHECK(s.skew_slant == doctest::Approx(skew_normal_delta(0.5)));
}

TEST_CASE("generate: Cauchy scale conventions") {
  auto spec = make_scenario(1, 30000, 2, 1, Distribution::Cauchy, 6);
  spec.sigma_schedule = {1.0, 4.0};
  auto iqr_ratio = [](const LabeledSample& s) {
    auto iqr = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v[v.size() * 3 / 4] - v[v.size() / 4];
    };
    const auto& x = s.data.values();
    std::vector<double> a(x.col(0).data(), x.col(0).data() + 15000);
    std::vector<double> b(x.col(0).data() + 15000, x.col(0).data() + 30000);
    return iqr(b) / iqr(a);
  };
  const auto sd = generate(spec);
  for (Eigen::Index i = 0; i < sd.data.values().size(); ++i) CHECK(std::isfinite(sd.data.values().data()[i]));
  CHECK(iqr_ratio(sd) == doctest::Approx(2.0).epsilon(0.1));
  spec.cauchy_scale = CauchyScale::Variance;
  CHECK(iqr_ratio(generate(spec)) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(parse_cauchy_scale(to_string(CauchyScale::Variance)) == CauchyScale::Variance);
}

TEST_CASE("generate: determinism and validation") {
  const auto spec = make_scenario(2, 500, 4, 3, Distribution::SkewNormal, 77);
  CHECK(generate(spec).data.values() == generate(spec).data.values());
  auto other = spec;
  other.seed = 78;
  CHECK(generate(spec).data.values() != generate(other).data.values());

  ScenarioSpec bad;
  bad.sigma_schedule = {1.0, 2.0};
  CHECK_THROWS_AS(generate(bad), Error);
  bad.change_fractions = {1.2};
  CHECK_THROWS_AS(generate(bad), Error);
  bad.change_fractions = {0.5};
  bad.sigma_schedule = {1.0, -2.0};
  CHECK_THROWS_AS(generate(bad), Error);
}

TEST_CASE("rank-sum test: brute-force Mann-Whitney oracle") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::uint32_t> a(3 + rng() % 20), b(3 + rng() % 20);
    for (auto& v : a) v = static_cast<std::uint32_t>(rng() % 12);
    for (auto& v : b) v = static_cast<std::uint32_t>(rng() % 12 + rep % 3);
    double u = 0.0;
    for (auto x : a)
      for (auto y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    std::map<std::uint32_t, double> tie;
    for (auto x : a) tie[x] += 1;
    for (auto y : b) tie[y] += 1;
    const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size()), n = n1 + n2;
    double t = 0.0;
    for (const auto& [v, c] : tie) t += c * c * c - c;
    const double var = n1 * n2 / 12.0 * (n + 1.0 - t / (n * (n - 1.0)));
    if (var <= 0.0) continue;
    const double z = (u - n1 * n2 / 2.0) / std::sqrt(var);
    const auto got = rank_sum_test(a, b);
    CHECK(got.z == doctest::Approx(z).epsilon(1e-10));
    CHECK(got.pvalue == doctest::Approx(std::erfc(std::abs(z) / std::sqrt(2.0))).epsilon(1e-10));
  }
}

TEST_CASE("rank demo: covariance scenarios") {
  CHECK(rank_demo_sigma1()(0, 1) == 0.4);
  CHECK(rank_demo_sigma1()(3, 5) == 0.4);
  CHECK(rank_demo_sigma1()(3, 4) == 0.0);
  CHECK(rank_demo_sigma2(RankDemo::Identical) == rank_demo_sigma1());
  for (auto demo : {RankDemo::DiagSubmatrix, RankDemo::OffDiagSubmatrix, RankDemo::Mixed, RankDemo::OffsettingExpContraction}) {
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(rank_demo_sigma2(demo)).eigenvalues().minCoeff() > 0.0);
    CHECK(parse_rank_demo(to_string(demo)) == demo);
  }
  const auto diag = rank_demo(RankDemo::DiagSubmatrix, 5000, 1);
  CHECK(rank_sum_test(diag.sample1, diag.sample2).pvalue < 0.01);
  // Identical covariance: exchangeable ranks, so no extreme rejection.
  const auto same = rank_demo(RankDemo::Identical, 2000, 2);
  CHECK(rank_sum_test(same.sample1, same.sample2).pvalue > 0.001);
  CHECK(same.sample1.size() == 2000);
  CHECK_THROWS_AS(rank_demo(RankDemo::Identical, 10, 2), Error);
}
