// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "depthseg/csv.hpp"
#include "depthseg/cusum.hpp"
#include "depthseg/parallel.hpp"
#include "depthseg/pelt.hpp"
#include "depthseg/ranking.hpp"
#include "depthseg/simgen.hpp"
#include "depthseg/wbs.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace depthseg;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << detail << std::endl;
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Conventional median: mean of the two middle values for even sizes.
template <typename T>
double median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? static_cast<double>(v[h]) : 0.5 * (static_cast<double>(v[h - 1]) + static_cast<double>(v[h]));
}

std::string sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

std::vector<std::uint32_t> ranks_of_values(const std::vector<double>& v) {
  DepthVector d;
  d.values = v;
  return rank_from_depths(d).ranks;
}

// Random rank sequence: a permutation, a level-shifted sequence, or one with ties.
std::vector<std::uint32_t> random_ranks(std::size_t n, std::mt19937_64& rng, int kind) {
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  const std::size_t a = rng() % n, b = rng() % n;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = z(rng);
    if (kind == 1 && i >= std::min(a, b) && i < std::max(a, b)) v[i] += 1.5;
    if (kind == 2) v[i] = std::round(v[i] * 2.0);
  }
  return ranks_of_values(v);
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  const std::vector<double> betas{0.5, 1.0, 2.0, 4.0, 8.0};
  std::size_t mismatched = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng() % 199;
    const auto r = random_ranks(n, rng, rep % 3);
    for (double beta : betas) {
      const auto got = pelt_optimize(r, beta);
      const auto want = oracle::optimal_partition(n, beta, 1, [&](std::size_t s, std::size_t e) { return oracle::kw_cost_direct(r, s, e); });
      const double diff = std::abs(got.cost_to.back() - want.value) / (1.0 + std::abs(want.value));
      worst = std::max(worst, diff);
      if (got.changes != want.changes || diff > 1e-9) ++mismatched;
    }
  }
  const double secs = seconds_since(t0);
  report(1, mismatched == 0 && secs < 10.0,
         "PELT vs unpruned DP on 200 sequences x 5 penalties: " + std::to_string(mismatched) +
             " mismatches, max rel. objective diff " + sci(worst) + " (tol 1e-9), " + fmt(secs, 2) + " s (limit 10 s)");
}

void criterion2() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  const std::vector<std::uint32_t> hand_r{1, 2, 3, 4, 5, 6};
  const std::vector<std::size_t> hand_k{3};
  const double hand = kw_statistic(hand_r, hand_k);
  const double hand_err = std::abs(hand - 27.0 / 7.0) / (27.0 / 7.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 3 + rng() % 300;
    const auto r = random_ranks(n, rng, rep % 3);
    std::vector<std::size_t> ks;
    const std::size_t every = 2 + rng() % 40;
    for (std::size_t k = 1; k < n; ++k)
      if (rng() % every == 0) ks.push_back(k);
    std::vector<std::vector<double>> groups;
    std::size_t start = 0;
    auto bounds = ks;
    bounds.push_back(n);
    for (auto k : bounds) {
      groups.emplace_back(r.begin() + static_cast<long>(start), r.begin() + static_cast<long>(k));
      start = k;
    }
    const double textbook = oracle::kruskal_wallis(groups);
    // Unpenalised Eq. (3) value from the library's segment costs and from kw_statistic.
    const KWSegmentCost cost(r);
    double from_costs = 0.0;
    start = 0;
    for (auto k : bounds) {
      from_costs -= cost(start, k);
      start = k;
    }
    // The cost form centres at (N+1)/2, which equals the rank mean only for
    // tie-free ranks; with ties compare through kw_statistic only.
    const bool distinct = rep % 3 != 2;
    const double scale = std::max(1.0, std::abs(textbook));
    worst = std::max(worst, std::abs(kw_statistic(r, ks) - textbook) / scale);
    if (distinct) worst = std::max(worst, std::abs(from_costs - textbook) / scale);
  }
  report(2, worst <= 1e-8 && hand_err <= 1e-12,
         "Kruskal-Wallis vs textbook on 1000 cases: max rel. error " + sci(worst) + " (tol 1e-8); hand case H = " +
             fmt(hand, 10) + " vs 27/7");
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const double q = sup_bridge_quantile(0.05);
  const std::size_t reps = 500;
  std::vector<int> exceed(reps, 0);
  parallel_for(reps, 0, [&](std::size_t rep) {
    ScenarioSpec spec;
    spec.n = 2000;
    spec.d = 3;
    spec.seed = 300000 + rep;
    const auto data = generate(spec).data;
    const auto profile = cusum_profile(depth_ranks(data, {1, 2000}, DepthKind::Mahalanobis));
    exceed[rep] = profile.max_abs > q ? 1 : 0;
  });
  const double rate = static_cast<double>(std::count(exceed.begin(), exceed.end(), 1)) / static_cast<double>(reps);
  report(3, rate >= 0.02 && rate <= 0.09,
         "null exceedance of q95 = " + fmt(q, 4) + " over 500 reps (N=2000, d=3): rate " + fmt(rate, 3) +
             " (target [0.02, 0.09]), " + fmt(seconds_since(t0), 1) + " s");
}

struct AccuracySummary {
  double median_diff = 0.0;
  double exact_fraction = 0.0;
  double within_fraction = 1.0;  // located changes within 0.10 N, among exact-count runs
  double median_offset = 0.0;
};

AccuracySummary summarize(const std::vector<std::vector<std::size_t>>& found, const std::vector<std::vector<std::size_t>>& truth,
                          std::size_t n) {
  AccuracySummary s;
  std::vector<long> diffs;
  std::vector<double> offsets;
  std::size_t exact = 0, within = 0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    diffs.push_back(static_cast<long>(found[i].size()) - static_cast<long>(truth[i].size()));
    if (found[i].size() != truth[i].size()) continue;
    ++exact;
    for (std::size_t j = 0; j < truth[i].size(); ++j) {
      const double off = std::abs(static_cast<double>(found[i][j]) - static_cast<double>(truth[i][j]));
      offsets.push_back(off);
      if (off <= 0.10 * static_cast<double>(n)) ++within;
    }
  }
  s.median_diff = median(diffs);
  s.exact_fraction = static_cast<double>(exact) / static_cast<double>(found.size());
  if (!offsets.empty()) {
    s.within_fraction = static_cast<double>(within) / static_cast<double>(offsets.size());
    s.median_offset = median(offsets);
  }
  return s;
}

enum class Detector { WBS, PELT };

// Runs `reps` replications of a scenario and returns the detected and true changes.
AccuracySummary run_scenario(Detector det, DepthKind depth, std::size_t reps, std::uint64_t seed_base,
                             const std::function<ScenarioSpec(std::uint64_t)>& make_spec) {
  std::vector<std::vector<std::size_t>> found(reps), truth(reps);
  std::size_t n = 0;
  parallel_for(reps, 0, [&](std::size_t rep) {
    const auto sample = generate(make_spec(seed_base + rep));
    DetectorConfig cfg;
    cfg.depth = depth;
    cfg.seed = seed_base + rep;
    found[rep] = (det == Detector::WBS ? wbs_detect(sample.data, cfg) : pelt_detect(sample.data, cfg)).indices();
    truth[rep] = sample.true_changes;
  });
  n = make_spec(0).n;
  return summarize(found, truth, n);
}

std::string describe(const char* name, const AccuracySummary& s) {
  return std::string(name) + ": median(l^-l) " + fmt(s.median_diff, 1) + ", exact " + fmt(100 * s.exact_fraction, 0) +
         "%, within 0.1N " + fmt(100 * s.within_fraction, 1) + "%, median offset " + fmt(s.median_offset, 1);
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  auto spec = [](std::uint64_t seed) { return make_scenario(1, 1000, 3, 2, Distribution::Gaussian, seed); };
  const auto wbs = run_scenario(Detector::WBS, DepthKind::Mahalanobis, 100, 400000, spec);
  const auto pelt = run_scenario(Detector::PELT, DepthKind::Mahalanobis, 100, 410000, spec);
  auto ok = [](const AccuracySummary& s) {
    return s.median_diff == 0 && s.exact_fraction >= 0.70 && s.within_fraction >= 0.90 && s.median_offset <= 30.0;
  };
  report(4, ok(wbs) && ok(pelt),
         describe("WBS", wbs) + "; " + describe("PELT", pelt) +
             " (need median 0, exact >= 70%, within >= 90%, offset <= 30); " + fmt(seconds_since(t0), 1) + " s");
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  auto spec_for = [](CauchyScale scale) {
    return [scale](std::uint64_t seed) {
      auto s = make_scenario(1, 1000, 3, 2, Distribution::Cauchy, seed);
      s.cauchy_scale = scale;
      return s;
    };
  };
  const auto spec = spec_for(CauchyScale::StdDev);
  const auto wbs_sp = run_scenario(Detector::WBS, DepthKind::Spatial, 100, 500000, spec);
  const auto pelt_sp = run_scenario(Detector::PELT, DepthKind::Spatial, 100, 510000, spec);
  const auto pelt_hs = run_scenario(Detector::PELT, DepthKind::Halfspace, 100, 520000, spec);
  const bool pass = wbs_sp.median_diff == 0 && (pelt_sp.median_diff == 0 || pelt_hs.median_diff == 0);
  report(5, pass,
         "Cauchy marginals scaled by sigma: " + describe("WBS spatial", wbs_sp) + "; " + describe("PELT spatial", pelt_sp) + "; " +
             describe("PELT halfspace", pelt_hs) + " (need median 0); " + fmt(seconds_since(t0), 1) + " s");

  // Not part of the verdict: the same design with Cauchy scale sigma^2.
  const auto alt = spec_for(CauchyScale::Variance);
  const auto wbs_alt = run_scenario(Detector::WBS, DepthKind::Spatial, 100, 500000, alt);
  const auto pelt_alt = run_scenario(Detector::PELT, DepthKind::Spatial, 100, 510000, alt);
  std::cout << "INFO  criterion 5 with Cauchy scale sigma^2: " << describe("WBS spatial", wbs_alt) << "; "
            << describe("PELT spatial", pelt_alt) << std::endl;
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t runs = 50;
  std::string detail;
  bool pass = true;
  for (auto demo : {RankDemo::DiagSubmatrix, RankDemo::OffDiagSubmatrix, RankDemo::Mixed, RankDemo::OffsettingExpContraction}) {
    std::vector<double> p(runs);
    parallel_for(runs, 0, [&](std::size_t rep) {
      const auto r = rank_demo(demo, 5000, 600000 + 100 * static_cast<std::uint64_t>(demo) + rep);
      p[rep] = rank_sum_test(r.sample1, r.sample2).pvalue;
    });
    const bool offsetting = demo == RankDemo::OffsettingExpContraction;
    const double level = offsetting ? 0.05 : 0.01;
    const auto rejected = static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v < level; }));
    const double frac = offsetting ? 1.0 - rejected / runs : rejected / runs;
    const double need = offsetting ? 0.90 : 0.95;
    pass = pass && frac >= need;
    detail += std::string(to_string(demo)) + (offsetting ? " non-reject@5% " : " reject@1% ") + fmt(100 * frac, 0) + "% (need " +
              fmt(100 * need, 0) + "%); ";
  }
  report(6, pass, detail + fmt(seconds_since(t0), 1) + " s");
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> exact;
  std::string detail;
  for (std::size_t b = 4; b >= 1; --b) {
    auto spec = [b](std::uint64_t seed) { return make_scenario(3, 1000, 5, 2, Distribution::Gaussian, seed, b); };
    const auto s = run_scenario(Detector::PELT, DepthKind::Halfspace, 100, 700000 + 1000 * b, spec);
    exact.push_back(s.exact_fraction);
    detail += "b=" + std::to_string(b) + " exact " + fmt(100 * s.exact_fraction, 0) + "%; ";
  }
  bool pass = true;
  for (std::size_t i = 1; i < exact.size(); ++i) pass = pass && exact[i] <= exact[i - 1] + 0.05;
  report(7, pass, "PELT halfspace d=5: " + detail + "nonincreasing within 5 points; " + fmt(seconds_since(t0), 1) + " s");
}

void criterion8() {
  std::vector<std::string> broken;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) broken.push_back(what);
  };
  std::mt19937_64 rng(808);
  std::normal_distribution<double> z;
  auto random_matrix = [&](Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
    return m;
  };
  auto ranks = [](const DepthVector& d) { return rank_from_depths(d).ranks; };

  for (int rep = 0; rep < 20; ++rep) {
    const auto d = static_cast<Eigen::Index>(1 + rep % 4);
    const Eigen::MatrixXd x = random_matrix(150, d);
    Eigen::MatrixXd a = random_matrix(d, d) + 2.0 * Eigen::MatrixXd::Identity(d, d);
    const Eigen::RowVectorXd shift = random_matrix(1, d) * 10.0;
    const Eigen::MatrixXd y = (x * a.transpose()).rowwise() + shift;
    check(ranks(mahalanobis_depth(x, x, false)) == ranks(mahalanobis_depth(y, y, false)), "Mahalanobis affine rank invariance");
    if (d <= 2) check(ranks(halfspace_depth(x, x)) == ranks(halfspace_depth(y, y)), "exact halfspace affine rank invariance");
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(d, d)).householderQ();
    const Eigen::MatrixXd w = (3.7 * x * q.transpose()).rowwise() + shift;
    check(ranks(spatial_depth(x, x)) == ranks(spatial_depth(w, w)), "spatial similarity rank invariance");
  }

  const auto sample = generate(make_scenario(1, 1000, 3, 4, Distribution::Gaussian, 8080));
  DetectorConfig cfg;
  cfg.seed = 8;
  std::vector<std::size_t> prev;
  for (double t : {4.0, 2.5, 1.5, 1.0, 0.7, 0.4}) {
    cfg.threshold = t;
    const auto cur = wbs_detect(sample.data, cfg).indices();
    check(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()), "WBS threshold nestedness");
    prev = cur;
  }

  const auto full = depth_ranks(sample.data, {1, 1000}, DepthKind::Mahalanobis).ranks;
  std::size_t last = full.size();
  for (double beta : {0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    const auto l = pelt_optimize(full, beta).changes.size();
    check(l <= last, "PELT changes monotone in beta");
    last = l;
  }

  cfg = DetectorConfig{};
  cfg.seed = 17;
  for (auto kind : {DepthKind::Mahalanobis, DepthKind::MahalanobisMCD75, DepthKind::Spatial, DepthKind::Halfspace}) {
    cfg.depth = kind;
    cfg.mcd_starts = 50;
    const auto small = generate(make_scenario(1, 300, 3, 2, Distribution::Gaussian, 9));
    check(pelt_detect(small.data, cfg).indices() == pelt_detect(small.data, cfg).indices(), "PELT determinism");
    check(compute_depth(kind, small.data.values(), small.data.values(), cfg.depth_options()).values ==
              compute_depth(kind, small.data.values(), small.data.values(), cfg.depth_options()).values,
          "depth determinism");
  }
  cfg.depth = DepthKind::Mahalanobis;
  const auto a = wbs_detect(sample.data, cfg);
  const auto b = wbs_detect(sample.data, cfg);
  check(a.indices() == b.indices() && a.sic_trace.size() == b.sic_trace.size(), "WBS determinism");
  const auto spec = make_scenario(2, 400, 3, 3, Distribution::SkewNormal, 5);
  check(generate(spec).data.values() == generate(spec).data.values(), "simulation determinism");
  check(sample_intervals(1000, 600, 20, 3).intervals == sample_intervals(1000, 600, 20, 3).intervals, "interval determinism");

  std::sort(broken.begin(), broken.end());
  broken.erase(std::unique(broken.begin(), broken.end()), broken.end());
  std::string detail = broken.empty() ? "all invariance and determinism assertions hold" : "broken:";
  for (const auto& s : broken) detail += " [" + s + "]";
  report(8, broken.empty(), detail);
}

void criterion9() {
  const char* bin = std::getenv("DEPTHSEG_BIN");
  if (!bin) {
    report(9, false, "DEPTHSEG_BIN is not set");
    return;
  }
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / ("depthseg_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);

  // Four return series with calm / crisis / recovery / stress regimes.
  ScenarioSpec spec;
  spec.n = 1750;
  spec.d = 4;
  spec.sigma_schedule = {1.0, 4.0, 1.5, 6.0};
  spec.change_fractions = {500.0 / 1750.0, 900.0 / 1750.0, 1350.0 / 1750.0};
  spec.seed = 9090;
  const auto sample = generate(spec);
  {
    std::ofstream f(dir / "returns.csv");
    f << "date,a1,a2,a3,a4\n";
    const auto& x = sample.data.values();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      f << "t" << i + 1;
      for (Eigen::Index j = 0; j < 4; ++j) f << ',' << format_double(x(i, j) * 0.01);
      f << '\n';
    }
  }
  const auto out = dir / "report.json";
  const auto table = dir / "table.txt";
  const std::string cmd = std::string(bin) + " detect --input " + (dir / "returns.csv").string() + " --output " + out.string() +
                          " --detector both --seed 1 >" + table.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    report(9, false, "detect exited with status " + std::to_string(status));
    return;
  }
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  std::ifstream tin(table);
  const std::string table_text((std::istreambuf_iterator<char>(tin)), std::istreambuf_iterator<char>());

  bool pass = j.contains("comparison") && table_text.find("wbs") != std::string::npos && table_text.find("pelt") != std::string::npos;
  std::string detail = "truth {500, 900, 1350};";
  double worst = 0.0;
  for (const char* det : {"wbs", "pelt"}) {
    const auto ks = j[det]["changes"].get<std::vector<std::size_t>>();
    const auto& segs = j["segments"][det];
    detail += std::string(" ") + det + " {";
    for (std::size_t i = 0; i < ks.size(); ++i) detail += (i ? ", " : "") + std::to_string(ks[i]);
    detail += "}";
    if (ks.size() != 3 || segs.size() != 4) {
      pass = false;
      continue;
    }
    for (std::size_t g = 1; g < 4; ++g) {
      const auto v0 = segs[g - 1]["variances"].get<std::vector<double>>();
      const auto v1 = segs[g]["variances"].get<std::vector<double>>();
      double ratio = 0.0;
      for (std::size_t c = 0; c < 4; ++c) ratio += v1[c] / v0[c] / 4.0;
      const double planted = spec.sigma_schedule[g] / spec.sigma_schedule[g - 1];
      worst = std::max(worst, std::abs(ratio / planted - 1.0));
    }
  }
  pass = pass && worst <= 0.25;
  detail += "; worst variance-ratio error " + fmt(100 * worst, 1) + "% (tol 25%)";
  report(9, pass, detail);
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                     criterion6, criterion7, criterion8, criterion9};
  // Optional arguments select criteria by number.
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id >= 1 && id <= static_cast<int>(criteria.size())) selected[static_cast<std::size_t>(id - 1)] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL  criterion threw: " << e.what() << std::endl;
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
