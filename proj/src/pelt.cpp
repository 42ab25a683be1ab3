#include "depthseg/pelt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "depthseg/ranking.hpp"

namespace depthseg {

namespace {

constexpr const char* kModule = "pelt";
constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective values closer than this (relative) count as ties. Integer ranks
// produce exact ties that rounding would otherwise break arbitrarily.
double tie_slack(double v) { return 1e-10 * (1.0 + std::abs(v)); }

}  // namespace

KWSegmentCost::KWSegmentCost(std::span<const std::uint32_t> ranks) : n_(ranks.size()), prefix_(ranks.size() + 1, 0.0) {
  if (n_ == 0) throw Error(ErrorKind::InvalidArgument, kModule, "rank sequence is empty");
  const double nd = static_cast<double>(n_);
  scale_ = 12.0 / (nd * (nd + 1.0));
  for (std::size_t i = 0; i < n_; ++i) prefix_[i + 1] = prefix_[i] + ranks[i];
}

double KWSegmentCost::operator()(std::size_t s, std::size_t e) const {
  const double len = static_cast<double>(e - s);
  // Rank sums are integers and len * (N + 1) / 2 is a half-integer, so the
  // centred sum is exact in double precision.
  const double centred = (prefix_[e] - prefix_[s]) - len * (static_cast<double>(n_) + 1.0) / 2.0;
  return -scale_ * centred * centred / len;
}

PeltSolution pelt_optimize(std::span<const std::uint32_t> ranks, double beta, std::size_t min_segment) {
  const auto n = ranks.size();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, kModule, "rank sequence is empty");
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "penalty must be positive");
  if (min_segment < 1) min_segment = 1;
  if (min_segment > n) {
    throw Error(ErrorKind::InvalidArgument, kModule, "minimum segment length exceeds series length");
  }

  PeltSolution sol;
  sol.beta = beta;
  sol.cost_to.assign(n + 1, kInf);
  sol.backpointer.assign(n + 1, 0);
  if (std::isinf(beta)) {
    sol.mean_candidates = 1.0;
    return sol;
  }
  const KWSegmentCost cost(ranks);
  sol.cost_to[0] = -beta;

  struct Candidate {
    std::size_t s;
    std::size_t dominated_at;  // first k with G(s) + c(s+1:k) > G(k); 0 = never
  };
  std::vector<Candidate> candidates{{0, 0}};
  double candidate_total = 0.0;

  for (std::size_t k = 1; k <= n; ++k) {
    // A candidate dominated at j can only be beaten by j once a segment of
    // min_segment fits after j.
    std::erase_if(candidates, [&](const Candidate& c) { return c.dominated_at != 0 && c.dominated_at + min_segment <= k; });
    candidate_total += static_cast<double>(candidates.size());

    double best = kInf;
    std::size_t arg = 0;
    for (const auto& c : candidates) {
      if (k - c.s < min_segment || std::isinf(sol.cost_to[c.s])) continue;
      const double v = sol.cost_to[c.s] + cost(c.s, k) + beta;
      if (std::isinf(best) || v < best - tie_slack(best)) {
        best = v;
        arg = c.s;
      }
    }
    sol.cost_to[k] = best;
    sol.backpointer[k] = arg;

    if (!std::isinf(best)) {
      for (auto& c : candidates) {
        if (c.dominated_at == 0 && !std::isinf(sol.cost_to[c.s]) && sol.cost_to[c.s] + cost(c.s, k) > best + tie_slack(best)) {
          c.dominated_at = k;
        }
      }
    }
    candidates.push_back({k, 0});
  }
  sol.mean_candidates = candidate_total / static_cast<double>(n);

  if (std::isinf(sol.cost_to[n])) {
    throw Error(ErrorKind::InvalidArgument, kModule, "no feasible segmentation for the minimum segment length");
  }
  for (std::size_t k = sol.backpointer[n]; k > 0; k = sol.backpointer[k]) sol.changes.push_back(k);
  std::reverse(sol.changes.begin(), sol.changes.end());
  return sol;
}

double kw_statistic(std::span<const std::uint32_t> ranks, std::span<const std::size_t> changes) {
  const auto n = ranks.size();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, kModule, "rank sequence is empty");
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  std::size_t start = 0;
  auto group = [&](std::size_t end) {
    if (end <= start || end > n) throw Error(ErrorKind::InvalidArgument, kModule, "invalid segmentation");
    double sum = 0.0;
    for (std::size_t i = start; i < end; ++i) sum += ranks[i];
    acc += sum * sum / static_cast<double>(end - start);
    start = end;
  };
  for (auto k : changes) group(k);
  group(n);
  return 12.0 / (nd * (nd + 1.0)) * acc - 3.0 * (nd + 1.0);
}

double kw_objective(std::span<const std::uint32_t> ranks, std::span<const std::size_t> changes, double beta) {
  return kw_statistic(ranks, changes) - beta * static_cast<double>(changes.size() + 1);
}

double default_penalty(std::size_t n, double c1, double c2) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, kModule, "penalty needs N >= 1");
  return c1 * std::sqrt(static_cast<double>(n)) + c2;
}

ChangePointResult pelt_detect(const DataMatrix& data, const DetectorConfig& config) {
  const auto n = data.rows();
  if (n < 2) throw Error(ErrorKind::InsufficientData, kModule, "at least two observations are required");
  const double beta = config.beta.value_or(default_penalty(n, config.c1, config.c2));
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "penalty must be positive");

  ChangePointResult result;
  result.selection = Selection::Penalty;
  result.full_ranks = depth_ranks(data, {1, n}, config.depth, config.depth_options()).ranks;
  const auto sol = pelt_optimize(result.full_ranks, beta, config.min_segment);

  std::size_t prev = 0;
  for (auto k : sol.changes) {
    ChangePoint cp;
    cp.k = k;
    cp.interval = {prev + 1, k};
    cp.parent_span = {1, n};
    result.changes.push_back(cp);
    prev = k;
  }
  result.num_changes = result.changes.size();
  PeltSummary summary;
  summary.beta = beta;
  summary.kw_statistic = kw_statistic(result.full_ranks, sol.changes);
  summary.objective = kw_objective(result.full_ranks, sol.changes, beta);
  summary.mean_candidates = sol.mean_candidates;
  result.pelt = summary;
  return result;
}

}  // namespace depthseg
