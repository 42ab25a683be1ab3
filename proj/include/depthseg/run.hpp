#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "depthseg/detector.hpp"
#include "depthseg/simgen.hpp"
#include "json.hpp"

namespace depthseg {

enum class DetectorChoice { WBS, PELT, Both };

std::string_view to_string(DetectorChoice choice);
std::optional<DetectorChoice> parse_detector(std::string_view name);

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumerical = 4;

struct RunConfig {
  std::string input_path;
  std::string output_path;
  DetectorChoice detector = DetectorChoice::Both;
  DetectorConfig detector_config;
  std::optional<std::string> emit_traces;  // directory

  // Checks everything that does not need the data.
  void validate() const;
  // Checks the module preconditions that depend on N and d.
  void validate_for(std::size_t n, std::size_t d) const;
};

// Default PELT floor used by the command line (the library default is 1).
inline constexpr std::size_t kCliMinSegment = 5;

struct DetectionReport {
  nlohmann::ordered_json json;
  std::string table;  // human-readable summary / comparison table
};

// Runs the configured detector(s) on `data` and assembles the JSON report.
// Trace files are written when config.emit_traces is set.
DetectionReport detect_report(const DataMatrix& data, const RunConfig& config);

// Full `detect` workflow: read CSV, run, write JSON. Returns an exit code and
// reports failures on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct SimulateConfig {
  std::string scenario = "1";  // 1, 2, 3 or rankdemo
  std::size_t n = 1000;
  std::size_t d = 3;
  std::size_t num_changes = 2;
  Distribution distribution = Distribution::Gaussian;
  double skewness = 0.0;
  CauchyScale cauchy_scale = CauchyScale::StdDev;
  std::optional<std::size_t> b;
  std::uint64_t seed = 0;
  RankDemo demo = RankDemo::DiagSubmatrix;
  std::size_t n_per_sample = 5000;
  DepthKind depth = DepthKind::Mahalanobis;
  std::string output_path;
  std::optional<std::string> truth_path;  // default: output with a .json extension
};

int run_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err);

}  // namespace depthseg
