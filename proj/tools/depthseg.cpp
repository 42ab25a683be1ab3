#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "depthseg/run.hpp"

int main(int argc, char** argv) {
  using namespace depthseg;

  CLI::App app{"Change-point detection in covariance structure via data-depth ranks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  RunConfig run_cfg;
  std::string detector = "both";
  std::string depth = "mahalanobis";
  std::string adjust = "bonferroni";
  std::string traces;
  double threshold = 0.0;
  double beta = 0.0;
  run_cfg.detector_config.min_segment = kCliMinSegment;
  auto& dc = run_cfg.detector_config;

  auto* detect = app.add_subcommand("detect", "Detect change-points in a CSV file");
  detect->add_option("--input", run_cfg.input_path, "Input CSV (one observation per row)")->required();
  detect->add_option("--output", run_cfg.output_path, "Output JSON path")->required();
  detect->add_option("--detector", detector, "pelt | wbs | both")->capture_default_str();
  detect->add_option("--depth", depth, "mahalanobis | mcd75 | spatial | halfspace")->capture_default_str();
  detect->add_option("--seed", dc.seed, "Random seed")->capture_default_str();
  detect->add_option("--J", dc.intervals, "Number of WBS intervals (default 100 floor(log N))");
  auto* alpha_opt = detect->add_option("--alpha", dc.alpha, "SIC penalty exponent")->capture_default_str();
  auto* threshold_opt = detect->add_option("--threshold", threshold, "Fixed WBS threshold (disables SIC)");
  alpha_opt->excludes(threshold_opt);
  detect->add_option("--c1", dc.c1, "PELT penalty slope on sqrt(N)")->capture_default_str();
  detect->add_option("--c2", dc.c2, "PELT penalty intercept")->capture_default_str();
  auto* beta_opt = detect->add_option("--beta", beta, "Explicit PELT penalty (overrides c1/c2)");
  detect->add_option("--min-length", dc.min_length, "Minimum WBS interval length")->capture_default_str();
  detect->add_option("--min-segment", dc.min_segment, "Minimum PELT segment length")->capture_default_str();
  detect->add_option("--adjust", adjust, "bonferroni | bh | none")->capture_default_str();
  detect->add_option("--directions", dc.halfspace_directions, "Halfspace directions for d >= 3 (default 1000 d)");
  detect->add_option("--threads", dc.threads, "Worker threads (0 = all cores)")->capture_default_str();
  detect->add_option("--emit-traces", traces, "Directory for CSV traces");

  SimulateConfig sim;
  std::string distribution = "gaussian";
  std::string demo = "diag";
  std::string sim_depth = "mahalanobis";
  std::string truth;
  std::string cauchy_scale = "sd";
  std::size_t b = 0;
  auto* simulate = app.add_subcommand("simulate", "Generate a labelled simulation sample");
  simulate->add_option("--scenario", sim.scenario, "1 | 2 | 3 | rankdemo")->capture_default_str();
  simulate->add_option("--n", sim.n, "Series length")->capture_default_str();
  simulate->add_option("--d", sim.d, "Dimension")->capture_default_str();
  simulate->add_option("--changes", sim.num_changes, "Number of change-points (at most 5)")->capture_default_str();
  simulate->add_option("--distribution", distribution, "gaussian | cauchy | skewnormal")->capture_default_str();
  simulate->add_option("--skewness", sim.skewness, "Skew-normal skewness (default 0.1 / d)");
  simulate->add_option("--cauchy-scale", cauchy_scale, "Cauchy marginals scaled by sigma (sd) or sigma^2 (variance)")
      ->capture_default_str();
  simulate->add_option("--b", b, "Scenario 3 submatrix size");
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--demo", demo, "Rank demo: diag | offdiag | mixed | offset | identical")->capture_default_str();
  simulate->add_option("--n-per-sample", sim.n_per_sample, "Rank demo sample size")->capture_default_str();
  simulate->add_option("--depth", sim_depth, "Rank demo depth")->capture_default_str();
  simulate->add_option("--output", sim.output_path, "Output CSV path")->required();
  simulate->add_option("--truth", truth, "Sidecar JSON path (default: output with .json extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (detect->parsed()) {
    const auto det = parse_detector(detector);
    const auto kind = parse_depth_kind(depth);
    const auto adj = parse_adjust(adjust);
    if (!det || !kind || !adj) {
      std::cerr << "configuration error: unknown value for --detector, --depth or --adjust\n";
      return kExitConfig;
    }
    run_cfg.detector = *det;
    dc.depth = *kind;
    dc.adjust = *adj;
    if (threshold_opt->count() > 0) dc.threshold = threshold;
    if (beta_opt->count() > 0) dc.beta = beta;
    if (!traces.empty()) run_cfg.emit_traces = traces;
    return run(run_cfg, std::cout, std::cerr);
  }

  const auto dist = parse_distribution(distribution);
  const auto dm = parse_rank_demo(demo);
  const auto sk = parse_depth_kind(sim_depth);
  const auto cs = parse_cauchy_scale(cauchy_scale);
  if (!dist || !dm || !sk || !cs) {
    std::cerr << "configuration error: unknown value for --distribution, --demo, --depth or --cauchy-scale\n";
    return kExitConfig;
  }
  sim.distribution = *dist;
  sim.demo = *dm;
  sim.depth = *sk;
  sim.cauchy_scale = *cs;
  if (b != 0) sim.b = b;
  if (!truth.empty()) sim.truth_path = truth;
  return run_simulate(sim, std::cout, std::cerr);
}
