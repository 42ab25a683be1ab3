#include "depthseg/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "depthseg/csv.hpp"
#include "depthseg/cusum.hpp"
#include "depthseg/pelt.hpp"
#include "depthseg/ranking.hpp"
#include "depthseg/segments.hpp"
#include "depthseg/wbs.hpp"

namespace depthseg {

namespace {

constexpr const char* kModule = "cli";

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, kModule, msg); }

json span_json(const Span& sp) { return json::array({sp.s, sp.e}); }

json segments_json(const std::vector<SegmentSummary>& segments) {
  json out = json::array();
  for (const auto& s : segments) {
    json cov = json::array();
    for (Eigen::Index i = 0; i < s.covariance.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < s.covariance.cols(); ++j) row.push_back(s.covariance(i, j));
      cov.push_back(std::move(row));
    }
    out.push_back({{"span", span_json(s.span)},
                   {"length", s.span.length()},
                   {"variances", s.variances},
                   {"covariance", std::move(cov)},
                   {"location", s.location}});
  }
  return out;
}

json wbs_json(const ChangePointResult& r, std::size_t intervals) {
  json details = json::array();
  for (std::size_t i = 0; i < r.changes.size(); ++i) {
    const auto& c = r.changes[i];
    details.push_back({{"k", c.k},
                       {"stat", c.stat},
                       {"interval", span_json(c.interval)},
                       {"parent_span", span_json(c.parent_span)},
                       {"recursion_depth", c.recursion_depth},
                       {"pvalue_raw", r.raw_pvalues.at(i)},
                       {"pvalue_adjusted", r.pvalues.at(i)}});
  }
  json out = {{"changes", r.indices()},
              {"num_changes", r.num_changes},
              {"selection", to_string(r.selection)}};
  if (r.selection == Selection::SIC) {
    out["alpha"] = r.alpha;
  } else {
    out["threshold"] = r.threshold;
  }
  out["intervals"] = intervals;
  out["adjust"] = to_string(r.adjust);
  out["statistics"] = json::array();
  for (const auto& c : r.changes) out["statistics"].push_back(c.stat);
  out["pvalues"] = r.pvalues;
  out["details"] = std::move(details);
  json trace = json::array();
  for (const auto& e : r.sic_trace) {
    trace.push_back({{"num_changes", e.num_changes}, {"value", e.value}, {"degenerate", e.degenerate}});
  }
  out["sic_trace"] = std::move(trace);
  return out;
}

json pelt_json(const ChangePointResult& r) {
  const auto& p = r.pelt.value();
  return {{"changes", r.indices()},
          {"num_changes", r.num_changes},
          {"beta", p.beta},
          {"objective", p.objective},
          {"kw_statistic", p.kw_statistic},
          {"mean_candidates", p.mean_candidates}};
}

void write_traces(const std::filesystem::path& dir, const DataMatrix& data, const ChangePointResult* wbs,
                  const ChangePointResult* pelt, const std::vector<SegmentSummary>* wbs_segments,
                  const std::vector<SegmentSummary>* pelt_segments) {
  std::filesystem::create_directories(dir);
  const auto& ranks = wbs ? wbs->full_ranks : pelt->full_ranks;
  {
    std::ofstream f(dir / "ranks.csv");
    f << "index,rank\n";
    for (std::size_t i = 0; i < ranks.size(); ++i) f << i + 1 << ',' << ranks[i] << '\n';
  }
  {
    const auto profile = cusum_profile(ranks, {1, data.rows()});
    std::ofstream f(dir / "cusum_full.csv");
    f << "m,index,z\n";
    for (std::size_t m = 1; m <= profile.z.size(); ++m) f << m << ',' << m << ',' << format_double(profile.z[m - 1]) << '\n';
  }
  if (wbs) {
    std::ofstream f(dir / "wbs_sic_trace.csv");
    f << "num_changes,value,degenerate\n";
    for (const auto& e : wbs->sic_trace) f << e.num_changes << ',' << format_double(e.value) << ',' << e.degenerate << '\n';
  }
  auto write_segments = [&](const char* name, const std::vector<SegmentSummary>& segs) {
    std::ofstream f(dir / name);
    f << "segment,s,e,i,j,covariance\n";
    for (std::size_t g = 0; g < segs.size(); ++g) {
      const auto& s = segs[g];
      for (Eigen::Index i = 0; i < s.covariance.rows(); ++i) {
        for (Eigen::Index j = i; j < s.covariance.cols(); ++j) {
          f << g + 1 << ',' << s.span.s << ',' << s.span.e << ',' << i + 1 << ',' << j + 1 << ','
            << format_double(s.covariance(i, j)) << '\n';
        }
      }
    }
  };
  if (wbs_segments) write_segments("segments_wbs.csv", *wbs_segments);
  if (pelt_segments) write_segments("segments_pelt.csv", *pelt_segments);
}

std::string comparison_table(const std::vector<std::size_t>& wbs, const std::vector<std::size_t>& pelt) {
  std::set<std::size_t> all(wbs.begin(), wbs.end());
  all.insert(pelt.begin(), pelt.end());
  const std::set<std::size_t> in_wbs(wbs.begin(), wbs.end());
  const std::set<std::size_t> in_pelt(pelt.begin(), pelt.end());
  std::ostringstream os;
  os << std::setw(10) << "index" << std::setw(10) << "wbs" << std::setw(10) << "pelt" << '\n';
  for (auto k : all) {
    os << std::setw(10) << k << std::setw(10) << (in_wbs.count(k) ? "yes" : "ND") << std::setw(10)
       << (in_pelt.count(k) ? "yes" : "ND") << '\n';
  }
  return os.str();
}

}  // namespace

std::string_view to_string(DetectorChoice choice) {
  switch (choice) {
    case DetectorChoice::WBS: return "wbs";
    case DetectorChoice::PELT: return "pelt";
    case DetectorChoice::Both: return "both";
  }
  return "unknown";
}

std::optional<DetectorChoice> parse_detector(std::string_view name) {
  if (name == "wbs") return DetectorChoice::WBS;
  if (name == "pelt") return DetectorChoice::PELT;
  if (name == "both") return DetectorChoice::Both;
  return std::nullopt;
}

void RunConfig::validate() const {
  const auto& c = detector_config;
  if (input_path.empty()) config_error("--input is required");
  if (output_path.empty()) config_error("--output is required");
  if (c.min_length < 2) config_error("--min-length must be at least 2");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) config_error("--alpha must be a positive number");
  if (c.threshold && !(*c.threshold >= 0.0)) config_error("--threshold must be non-negative");
  if (!(c.c1 >= 0.0) || !std::isfinite(c.c1) || !std::isfinite(c.c2)) config_error("--c1/--c2 must be finite, c1 >= 0");
  if (c.beta && !(*c.beta > 0.0)) config_error("--beta must be positive");
  if (c.min_segment < 1) config_error("--min-segment must be at least 1");
  if (c.mcd_starts < 1) config_error("MCD needs at least one start");
}

void RunConfig::validate_for(std::size_t n, std::size_t d) const {
  const auto& c = detector_config;
  auto need = [&](std::size_t m, const char* what) -> std::size_t {
    switch (c.depth) {
      case DepthKind::Mahalanobis:
        if (m < d + 2) config_error(std::string(what) + " must be at least d + 2 = " + std::to_string(d + 2) + " for Mahalanobis depth");
        break;
      case DepthKind::MahalanobisMCD75:
        if (m < 2 * (d + 1)) config_error(std::string(what) + " must be at least 2(d + 1) = " + std::to_string(2 * (d + 1)) + " for MCD depth");
        break;
      default: break;
    }
    return m;
  };
  if (detector != DetectorChoice::PELT) {
    if (n < 2 * c.min_length) {
      config_error("series length " + std::to_string(n) + " is below 2 * min-length = " + std::to_string(2 * c.min_length));
    }
    need(c.min_length, "--min-length");
  }
  if (detector != DetectorChoice::WBS) {
    need(n, "series length");
    if (c.min_segment > n) config_error("--min-segment exceeds the series length");
    const double beta = c.beta.value_or(default_penalty(n, c.c1, c.c2));
    if (!(beta > 0.0)) config_error("PELT penalty c1 * sqrt(N) + c2 must be positive");
  }
}

DetectionReport detect_report(const DataMatrix& data, const RunConfig& config) {
  const auto& c = config.detector_config;
  const auto n = data.rows();
  json report;
  report["schema"] = 1;
  report["version"] = std::string(kVersion);
  report["index_convention"] = "1-based; a change at k is the last index of the pre-change segment";
  report["seed"] = c.seed;
  const std::size_t intervals = c.intervals != 0 ? c.intervals : default_interval_count(n);
  json cfg = {{"detector", to_string(config.detector)},
              {"depth", to_string(c.depth)},
              {"intervals", intervals},
              {"min_length", c.min_length},
              {"selection", c.threshold ? "threshold" : "sic"},
              {"alpha", c.alpha},
              {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)},
              {"c1", c.c1},
              {"c2", c.c2},
              {"beta", c.beta ? json(*c.beta) : json(nullptr)},
              {"min_segment", c.min_segment},
              {"adjust", to_string(c.adjust)},
              {"halfspace_directions", c.halfspace_directions != 0 ? c.halfspace_directions : 1000 * data.dim()},
              {"seed", c.seed}};
  report["config"] = std::move(cfg);
  report["input"] = {{"path", config.input_path}, {"rows", n}, {"columns", data.dim()}};

  std::optional<ChangePointResult> wbs;
  std::optional<ChangePointResult> pelt;
  std::optional<std::vector<SegmentSummary>> wbs_segments;
  std::optional<std::vector<SegmentSummary>> pelt_segments;
  std::ostringstream table;

  if (config.detector != DetectorChoice::PELT) {
    wbs = wbs_detect(data, c);
    wbs_segments = summarize_segments(data, wbs->indices());
    report["wbs"] = wbs_json(*wbs, intervals);
  }
  if (config.detector != DetectorChoice::WBS) {
    pelt = pelt_detect(data, c);
    pelt_segments = summarize_segments(data, pelt->indices());
    report["pelt"] = pelt_json(*pelt);
  }

  if (config.detector == DetectorChoice::Both) {
    const auto a = wbs->indices();
    const auto b = pelt->indices();
    std::vector<std::size_t> common, wbs_only, pelt_only;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(wbs_only));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(pelt_only));
    report["comparison"] = {{"common", common}, {"wbs_only", wbs_only}, {"pelt_only", pelt_only}};
    table << comparison_table(a, b);
  } else {
    const auto& r = wbs ? *wbs : *pelt;
    report["changes"] = r.indices();
    table << to_string(config.detector) << " changes:";
    for (auto k : r.indices()) table << ' ' << k;
    table << '\n';
  }

  json segs;
  if (wbs_segments) segs["wbs"] = segments_json(*wbs_segments);
  if (pelt_segments) segs["pelt"] = segments_json(*pelt_segments);
  report["segments"] = std::move(segs);

  if (config.emit_traces) {
    write_traces(*config.emit_traces, data, wbs ? &*wbs : nullptr, pelt ? &*pelt : nullptr,
                 wbs_segments ? &*wbs_segments : nullptr, pelt_segments ? &*pelt_segments : nullptr);
    if (wbs) {
      // CUSUM profile of the interval that selected each WBS change.
      std::ofstream f(std::filesystem::path(*config.emit_traces) / "wbs_cusum_profiles.csv");
      f << "change,interval_s,interval_e,m,index,z\n";
      const auto opts = c.depth_options();
      for (const auto& cp : wbs->changes) {
        const auto profile = cusum_profile(depth_ranks(data, cp.interval, c.depth, opts));
        for (std::size_t m = 1; m <= profile.z.size(); ++m) {
          f << cp.k << ',' << cp.interval.s << ',' << cp.interval.e << ',' << m << ',' << cp.interval.s + m - 1 << ','
            << format_double(profile.z[m - 1]) << '\n';
        }
      }
    }
  }
  return {std::move(report), table.str()};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  CsvTable table;
  try {
    table = read_csv_file(config.input_path);
  } catch (const Error& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  }
  try {
    config.validate_for(table.data.rows(), table.data.dim());
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  DetectionReport report;
  try {
    report = detect_report(table.data, config);
  } catch (const Error& e) {
    err << "numerical failure in module '" << e.module() << "' (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitNumerical;
  }
  report.json["input"]["header"] = table.has_header;
  report.json["input"]["timestamp_column"] = table.has_timestamp;
  std::ofstream f(config.output_path);
  if (!f) {
    err << "cannot write output file '" << config.output_path << "'\n";
    return kExitParse;
  }
  f << report.json.dump(2) << '\n';
  out << report.table;
  return kExitOk;
}

int run_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err) {
  if (config.output_path.empty()) {
    err << "configuration error: --output is required\n";
    return kExitConfig;
  }
  auto truth_path = config.truth_path.value_or(std::filesystem::path(config.output_path).replace_extension(".json").string());
  json truth;
  truth["schema"] = 1;
  truth["version"] = std::string(kVersion);
  truth["seed"] = config.seed;
  try {
    if (config.scenario == "rankdemo") {
      const auto demo = rank_demo(config.demo, config.n_per_sample, config.seed, config.depth);
      const auto test = rank_sum_test(demo.sample1, demo.sample2);
      std::ofstream f(config.output_path);
      f << "sample,rank\n";
      for (auto r : demo.sample1) f << "1," << r << '\n';
      for (auto r : demo.sample2) f << "2," << r << '\n';
      truth["scenario"] = "rankdemo";
      truth["demo"] = to_string(config.demo);
      truth["n_per_sample"] = config.n_per_sample;
      truth["depth"] = to_string(config.depth);
      truth["rank_sum_z"] = test.z;
      truth["rank_sum_pvalue"] = test.pvalue;
      out << "rank-sum z = " << test.z << ", p = " << test.pvalue << '\n';
    } else {
      int scenario = 0;
      if (config.scenario == "1") scenario = 1;
      if (config.scenario == "2") scenario = 2;
      if (config.scenario == "3") scenario = 3;
      if (scenario == 0) {
        err << "configuration error: unknown scenario '" << config.scenario << "'\n";
        return kExitConfig;
      }
      auto spec = make_scenario(scenario, config.n, config.d, config.num_changes, config.distribution, config.seed, config.b);
      spec.skewness = config.skewness;
      spec.cauchy_scale = config.cauchy_scale;
      const auto sample = generate(spec);
      std::ofstream f(config.output_path);
      if (!f) {
        err << "cannot write output file '" << config.output_path << "'\n";
        return kExitParse;
      }
      write_csv(f, sample.data);
      truth["scenario"] = scenario;
      truth["n"] = spec.n;
      truth["d"] = spec.d;
      truth["distribution"] = to_string(spec.distribution);
      truth["sigma_schedule"] = spec.sigma_schedule;
      truth["change_fractions"] = spec.change_fractions;
      truth["true_changes"] = sample.true_changes;
      truth["submatrix_b"] = spec.submatrix_b ? json(*spec.submatrix_b) : json(nullptr);
      if (spec.distribution == Distribution::SkewNormal) {
        truth["skewness"] = spec.skewness != 0.0 ? spec.skewness : 0.1 / static_cast<double>(spec.d);
        truth["skew_normal_delta"] = sample.skew_slant;
      }
      if (spec.distribution == Distribution::Cauchy) truth["cauchy_scale"] = to_string(spec.cauchy_scale);
      out << "true changes:";
      for (auto k : sample.true_changes) out << ' ' << k;
      out << '\n';
    }
  } catch (const Error& e) {
    err << "configuration error in module '" << e.module() << "': " << e.what() << '\n';
    return kExitConfig;
  }
  std::ofstream t(truth_path);
  t << truth.dump(2) << '\n';
  return kExitOk;
}

}  // namespace depthseg
