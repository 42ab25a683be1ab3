#include "depthseg/wbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <numeric>
#include <random>
#include <string>

#include "depthseg/parallel.hpp"

namespace depthseg {

namespace {

constexpr const char* kModule = "wbs";

struct IntervalMax {
  std::size_t k = 0;
  double stat = -1.0;
};

struct Recursion {
  const std::vector<Span>& intervals;
  const std::vector<IntervalMax>& maxima;
  double threshold;
  std::vector<ChangePoint> found;      // discovery (preorder) order
  std::vector<double> entry_level;     // threshold below which each one enters

  // Best interval inside [s, e]: largest statistic, then smallest j.
  std::optional<std::size_t> best_inside(const Span& span) const {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < intervals.size(); ++j) {
      if (!span.contains(intervals[j])) continue;
      if (!best || maxima[j].stat > maxima[*best].stat) best = j;
    }
    return best;
  }

  void run(const Span& span, std::size_t depth, double parent_level) {
    if (span.e <= span.s) return;
    const auto j = best_inside(span);
    if (!j) {
      if (depth == 0) throw Error(ErrorKind::EmptyIntervalSet, kModule, "no sampled interval fits in the series");
      return;
    }
    const auto& best = maxima[*j];
    if (!(best.stat > threshold)) return;
    ChangePoint cp;
    cp.k = best.k;
    cp.stat = best.stat;
    cp.interval = intervals[*j];
    cp.parent_span = span;
    cp.recursion_depth = depth;
    found.push_back(cp);
    const double level = std::min(parent_level, best.stat);
    entry_level.push_back(level);
    run({span.s, best.k}, depth + 1, level);
    run({best.k + 1, span.e}, depth + 1, level);
  }
};

std::vector<ChangePoint> sorted_by_k(std::vector<ChangePoint> changes) {
  std::sort(changes.begin(), changes.end(), [](const ChangePoint& a, const ChangePoint& b) { return a.k < b.k; });
  return changes;
}

}  // namespace

std::size_t default_interval_count(std::size_t n) {
  return 100 * static_cast<std::size_t>(std::floor(std::log(static_cast<double>(n))));
}

IntervalSet sample_intervals(std::size_t n, std::size_t count, std::size_t min_length, std::uint64_t seed) {
  if (min_length < 2) throw Error(ErrorKind::InvalidArgument, kModule, "minimum interval length must be at least 2");
  if (count < 1) throw Error(ErrorKind::InvalidArgument, kModule, "at least one interval is required");
  if (min_length > n) {
    throw Error(ErrorKind::InfeasibleIntervals, kModule,
                "minimum interval length " + std::to_string(min_length) + " exceeds series length " +
                    std::to_string(n));
  }
  IntervalSet out;
  out.count = count;
  out.seed = seed;
  out.min_length = min_length;
  out.intervals.reserve(count);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(1, n);
  // An unordered pair of distinct endpoints arises from exactly two ordered
  // draws, so accepting sorted pairs keeps the law uniform over valid pairs.
  while (out.intervals.size() < count) {
    const auto a = pick(rng);
    const auto b = pick(rng);
    const Span sp{std::min(a, b), std::max(a, b)};
    if (sp.e > sp.s && sp.length() >= min_length) out.intervals.push_back(sp);
  }
  return out;
}

ChangePointResult wbs_detect(const DataMatrix& data, const DetectorConfig& config) {
  const auto n = data.rows();
  if (config.min_length < 2) throw Error(ErrorKind::InvalidArgument, kModule, "min_length must be at least 2");
  if (n < 2 * config.min_length) {
    throw Error(ErrorKind::InsufficientData, kModule,
                "series length " + std::to_string(n) + " is below 2 * min_length = " +
                    std::to_string(2 * config.min_length));
  }
  const auto count = config.intervals != 0 ? config.intervals : std::max<std::size_t>(1, default_interval_count(n));
  return wbs_detect(data, config, sample_intervals(n, count, config.min_length, config.seed));
}

ChangePointResult wbs_detect(const DataMatrix& data, const DetectorConfig& config, const IntervalSet& set) {
  const auto n = data.rows();
  if (n < 2) throw Error(ErrorKind::InsufficientData, kModule, "at least two observations are required");
  for (const auto& sp : set.intervals) {
    if (sp.s < 1 || sp.e > n || sp.e <= sp.s) {
      throw Error(ErrorKind::InvalidArgument, kModule, "interval outside the series");
    }
  }
  const auto depth_opts = config.depth_options();

  std::vector<IntervalMax> maxima(set.intervals.size());
  parallel_for(set.intervals.size(), config.threads, [&](std::size_t j) {
    const auto ranks = depth_ranks(data, set.intervals[j], config.depth, depth_opts);
    const auto est = single_change_estimate(cusum_profile(ranks));
    maxima[j] = {est.k, est.stat};
  });

  ChangePointResult result;
  result.full_ranks = depth_ranks(data, {1, n}, config.depth, depth_opts).ranks;
  result.adjust = config.adjust;

  const bool sic = !config.threshold.has_value();
  Recursion rec{set.intervals, maxima, sic ? 0.0 : *config.threshold, {}, {}};
  rec.run({1, n}, 0, std::numeric_limits<double>::infinity());

  if (!sic) {
    result.selection = Selection::FixedThreshold;
    result.threshold = *config.threshold;
    result.changes = sorted_by_k(rec.found);
  } else {
    result.selection = Selection::SIC;
    result.alpha = config.alpha;
    // Thresholding admits a change only once every ancestor is admitted, so
    // the nested path orders by entry level, then discovery.
    std::vector<std::size_t> order(rec.found.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rec.entry_level[a] > rec.entry_level[b]; });
    for (auto i : order) result.candidates.push_back(rec.found[i]);

    const std::size_t cap =
        config.max_changes != 0 ? config.max_changes : std::min<std::size_t>(20, n / (2 * config.min_length));
    const std::size_t l_max = std::min(cap, result.candidates.size());
    std::size_t best = 0;
    bool have_best = false;
    std::vector<std::size_t> ks;
    for (std::size_t l = 0; l <= l_max; ++l) {
      if (l > 0) {
        ks.insert(std::upper_bound(ks.begin(), ks.end(), result.candidates[l - 1].k), result.candidates[l - 1].k);
      }
      const auto score = sic_criterion(result.full_ranks, ks, config.alpha);
      result.sic_trace.push_back({l, score.value, score.degenerate});
      if (score.degenerate) continue;
      if (!have_best || score.value < result.sic_trace[best].value) {
        best = l;
        have_best = true;
      }
    }
    std::vector<ChangePoint> chosen(result.candidates.begin(),
                                    result.candidates.begin() + static_cast<std::ptrdiff_t>(have_best ? best : 0));
    result.changes = sorted_by_k(std::move(chosen));
  }
  result.num_changes = result.changes.size();

  if (!result.changes.empty()) {
    std::vector<double> stats;
    for (const auto& c : result.changes) stats.push_back(c.stat);
    for (double s : stats) result.raw_pvalues.push_back(sup_bridge_pvalue(s));
    result.pvalues = adjust_raw_pvalues(result.raw_pvalues, config.adjust);
  }
  return result;
}

SicScore sic_criterion(std::span<const std::uint32_t> ranks, std::span<const std::size_t> changes, double alpha) {
  const auto n = ranks.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, kModule, "SIC needs at least two ranks");
  double rss = 0.0;
  std::size_t start = 0;
  auto accumulate = [&](std::size_t end) {
    if (end <= start || end > n) throw Error(ErrorKind::InvalidArgument, kModule, "invalid segmentation");
    double mean = 0.0;
    for (std::size_t i = start; i < end; ++i) mean += ranks[i];
    mean /= static_cast<double>(end - start);
    for (std::size_t i = start; i < end; ++i) rss += (ranks[i] - mean) * (ranks[i] - mean);
    start = end;
  };
  for (auto k : changes) accumulate(k);
  accumulate(n);
  const double nd = static_cast<double>(n);
  const double variance = rss / nd;
  if (variance <= 0.0) return {-std::numeric_limits<double>::infinity(), true};
  return {0.5 * nd * std::log(variance) + static_cast<double>(changes.size()) * std::pow(std::log(nd), alpha), false};
}

std::vector<double> adjust_raw_pvalues(std::span<const double> raw, Adjust method) {
  const auto m = raw.size();
  std::vector<double> out(raw.begin(), raw.end());
  if (m == 0) return out;
  const double md = static_cast<double>(m);
  switch (method) {
    case Adjust::None: break;
    case Adjust::Bonferroni:
      for (auto& p : out) p = std::min(1.0, p * md);
      break;
    case Adjust::BH: {
      std::vector<std::size_t> order(m);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
      double running = 1.0;
      for (std::size_t r = m; r-- > 0;) {
        const auto i = order[r];
        running = std::min(running, raw[i] * md / static_cast<double>(r + 1));
        out[i] = running;
      }
      break;
    }
  }
  return out;
}

std::vector<double> adjust_pvalues(std::span<const double> stats, Adjust method) {
  if (stats.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no statistics to adjust");
  std::vector<double> raw;
  raw.reserve(stats.size());
  for (double s : stats) raw.push_back(sup_bridge_pvalue(s));
  return adjust_raw_pvalues(raw, method);
}

}  // namespace depthseg
