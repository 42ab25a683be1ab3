#include "depthseg/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

namespace depthseg {

namespace {

constexpr const char* kModule = "depth";

void require_same_dim(const MatrixView& points, const MatrixView& reference) {
  if (points.cols() != reference.cols()) {
    throw Error(ErrorKind::InvalidArgument, kModule,
                "points have dimension " + std::to_string(points.cols()) + " but reference has " +
                    std::to_string(reference.cols()));
  }
  if (reference.rows() < 1) {
    throw Error(ErrorKind::InsufficientData, kModule, "reference sample is empty");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Cholesky factor of a scatter matrix, rejecting numerically singular input.
Eigen::LLT<Eigen::MatrixXd> factor_scatter(const Eigen::MatrixXd& scatter) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxScatterCondition) {
    throw Error(ErrorKind::SingularScatter, kModule,
                "scatter matrix is numerically singular (eigenvalue range " + std::to_string(lo) + " .. " +
                    std::to_string(hi) + ")");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(scatter);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularScatter, kModule, "scatter matrix is not positive definite");
  }
  return llt;
}

// ---- MCD helpers ----------------------------------------------------------

struct Fit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // denominator = subset size
  double log_det = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset;
};

bool fit_subset(const MatrixView& x, const std::vector<std::size_t>& idx, Fit& out) {
  const auto d = x.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (auto i : idx) mean += x.row(static_cast<Eigen::Index>(i)).transpose();
  mean /= static_cast<double>(idx.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (auto i : idx) {
    const Eigen::VectorXd c = x.row(static_cast<Eigen::Index>(i)).transpose() - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(idx.size());

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 0.0) return false;
  if ((diag.maxCoeff() / diag.minCoeff()) * (diag.maxCoeff() / diag.minCoeff()) > kMaxScatterCondition) {
    return false;
  }
  out.mean = std::move(mean);
  out.cov = std::move(cov);
  out.log_det = 2.0 * diag.array().log().sum();
  out.subset = idx;
  return true;
}

std::vector<double> squared_distances(const MatrixView& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::MatrixXd solved = llt.matrixL().solve(centered.transpose());
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = solved.col(i).squaredNorm();
  return out;
}

// One concentration step: refit on the h points closest under the current fit.
bool c_step(const MatrixView& x, std::size_t h, Fit& fit) {
  const auto dist = squared_distances(x, fit.mean, fit.cov);
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(h - 1), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
  order.resize(h);
  std::sort(order.begin(), order.end());
  Fit next;
  if (!fit_subset(x, order, next)) return false;
  fit = std::move(next);
  return true;
}

}  // namespace

std::string_view to_string(DepthKind kind) {
  switch (kind) {
    case DepthKind::Halfspace: return "halfspace";
    case DepthKind::Spatial: return "spatial";
    case DepthKind::Mahalanobis: return "mahalanobis";
    case DepthKind::MahalanobisMCD75: return "mcd75";
  }
  return "unknown";
}

std::optional<DepthKind> parse_depth_kind(std::string_view name) {
  if (name == "halfspace") return DepthKind::Halfspace;
  if (name == "spatial") return DepthKind::Spatial;
  if (name == "mahalanobis") return DepthKind::Mahalanobis;
  if (name == "mcd75") return DepthKind::MahalanobisMCD75;
  return std::nullopt;
}

DepthVector mahalanobis_depth(const MatrixView& points, const Eigen::VectorXd& location,
                              const Eigen::MatrixXd& scatter) {
  if (location.size() != points.cols() || scatter.rows() != points.cols() || scatter.cols() != points.cols()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "location/scatter do not match point dimension");
  }
  const auto llt = factor_scatter(scatter);
  Eigen::MatrixXd centered = (points.rowwise() - location.transpose()).transpose();
  llt.matrixL().solveInPlace(centered);
  DepthVector out;
  out.values.resize(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.values[static_cast<std::size_t>(i)] = 1.0 / (1.0 + centered.col(i).squaredNorm());
  }
  return out;
}

DepthVector mahalanobis_depth(const MatrixView& points, const MatrixView& reference, bool robust,
                              const McdOptions& mcd) {
  require_same_dim(points, reference);
  const auto m = reference.rows();
  const auto d = reference.cols();
  if (m < d + 2) {
    throw Error(ErrorKind::InsufficientData, kModule,
                "Mahalanobis depth needs at least d + 2 = " + std::to_string(d + 2) + " reference points, got " +
                    std::to_string(m));
  }
  DepthVector out;
  if (robust) {
    const auto est = mcd_estimate(reference, mcd);
    out = mahalanobis_depth(points, est.location, est.scatter);
    out.kind = DepthKind::MahalanobisMCD75;
  } else {
    const Eigen::VectorXd mean = reference.colwise().mean().transpose();
    const Eigen::MatrixXd centered = reference.rowwise() - mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
    out = mahalanobis_depth(points, mean, cov);
    out.kind = DepthKind::Mahalanobis;
  }
  return out;
}

DepthVector spatial_depth(const MatrixView& points, const MatrixView& reference) {
  require_same_dim(points, reference);
  const auto m = reference.rows();
  const auto d = reference.cols();
  DepthVector out;
  out.kind = DepthKind::Spatial;
  out.values.resize(static_cast<std::size_t>(points.rows()));
  // Row-major copies keep the inner loop contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ref = reference;
  Eigen::VectorXd acc(d);
  Eigen::VectorXd diff(d);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    acc.setZero();
    const Eigen::VectorXd x = points.row(i).transpose();
    for (Eigen::Index j = 0; j < m; ++j) {
      diff = x - ref.row(j).transpose();
      const double norm = diff.norm();
      if (norm > 0.0) acc += diff / norm;
    }
    out.values[static_cast<std::size_t>(i)] = clamp01(1.0 - acc.norm() / static_cast<double>(m));
  }
  return out;
}

namespace {

DepthVector halfspace_exact_1d(const MatrixView& points, const MatrixView& reference) {
  std::vector<double> ref;
  ref.reserve(static_cast<std::size_t>(reference.rows()));
  for (Eigen::Index j = 0; j < reference.rows(); ++j) ref.push_back(reference(j, 0));
  std::sort(ref.begin(), ref.end());
  const auto m = static_cast<double>(ref.size());
  DepthVector out;
  out.kind = DepthKind::Halfspace;
  out.values.resize(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double x = points(i, 0);
    const auto le = std::upper_bound(ref.begin(), ref.end(), x) - ref.begin();
    const auto ge = ref.end() - std::lower_bound(ref.begin(), ref.end(), x);
    out.values[static_cast<std::size_t>(i)] = static_cast<double>(std::min(le, ge)) / m;
  }
  return out;
}

// Angular sweep: the closed halfplane through x with least mass is the
// complement of the open halfplane with the most points, and the latter is
// found by sliding a half-open semicircle over the sorted directions.
DepthVector halfspace_exact_2d(const MatrixView& points, const MatrixView& reference) {
  const auto m = static_cast<std::size_t>(reference.rows());
  DepthVector out;
  out.kind = DepthKind::Halfspace;
  out.values.resize(static_cast<std::size_t>(points.rows()));

  struct Dir {
    double x, y, angle;
  };
  std::vector<Dir> dirs;
  dirs.reserve(m);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double px = points(i, 0);
    const double py = points(i, 1);
    dirs.clear();
    std::size_t coincident = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double vx = reference(static_cast<Eigen::Index>(j), 0) - px;
      const double vy = reference(static_cast<Eigen::Index>(j), 1) - py;
      if (vx == 0.0 && vy == 0.0) {
        ++coincident;
      } else {
        dirs.push_back({vx, vy, std::atan2(vy, vx)});
      }
    }
    const std::size_t n = dirs.size();
    std::size_t best_open = 0;
    if (n > 0) {
      std::sort(dirs.begin(), dirs.end(), [](const Dir& a, const Dir& b) { return a.angle < b.angle; });
      // b lies in [angle(a), angle(a) + pi).
      auto in_half = [](const Dir& a, const Dir& b) {
        const double cross = a.x * b.y - a.y * b.x;
        return cross > 0.0 || (cross == 0.0 && a.x * b.x + a.y * b.y > 0.0);
      };
      std::size_t j = 0;
      for (std::size_t k = 0; k < n; ++k) {
        j = std::max(j, k + 1);
        while (j < k + n && in_half(dirs[k], dirs[j % n])) ++j;
        best_open = std::max(best_open, j - k);
      }
    }
    const std::size_t min_closed = coincident + (n - best_open);
    out.values[static_cast<std::size_t>(i)] = static_cast<double>(min_closed) / static_cast<double>(m);
  }
  return out;
}

DepthVector halfspace_sampled(const MatrixView& points, const MatrixView& reference, std::size_t directions,
                              std::uint64_t seed) {
  const auto d = reference.cols();
  const auto m = static_cast<std::size_t>(reference.rows());
  const auto p = static_cast<std::size_t>(points.rows());
  if (directions == 0) directions = 1000 * static_cast<std::size_t>(d);

  // Axis directions first, then Gaussian draws normalised onto the sphere.
  const std::size_t total = directions + static_cast<std::size_t>(d);
  Eigen::MatrixXd dirs(d, static_cast<Eigen::Index>(total));
  dirs.leftCols(d).setIdentity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < directions; ++k) {
    auto col = dirs.col(static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(k));
    do {
      for (Eigen::Index r = 0; r < d; ++r) col(r) = normal(rng);
    } while (col.norm() == 0.0);
    col.normalize();
  }

  // Each direction u also supplies -u through the count of X'u >= x'u.
  std::vector<std::size_t> best(p, m);
  constexpr std::size_t kBlock = 256;
  // Per direction: sort both projections, then one merge pass gives
  // #{X'u <= x'u} and #{X'u >= x'u} for every query point.
  const bool self = points.data() == reference.data() && points.rows() == reference.rows() &&
                    points.outerStride() == reference.outerStride();
  std::vector<double> proj(m);
  std::vector<std::pair<double, std::size_t>> queries(p);
  for (std::size_t b0 = 0; b0 < total; b0 += kBlock) {
    const auto nb = static_cast<Eigen::Index>(std::min(kBlock, total - b0));
    const Eigen::MatrixXd u = dirs.middleCols(static_cast<Eigen::Index>(b0), nb);
    const Eigen::MatrixXd ref_proj = reference * u;
    const Eigen::MatrixXd pt_proj = self ? Eigen::MatrixXd() : Eigen::MatrixXd(points * u);
    const Eigen::MatrixXd& qp = self ? ref_proj : pt_proj;
    for (Eigen::Index c = 0; c < nb; ++c) {
      for (std::size_t i = 0; i < p; ++i) queries[i] = {qp(static_cast<Eigen::Index>(i), c), i};
      std::sort(queries.begin(), queries.end());
      if (self) {
        for (std::size_t j = 0; j < m; ++j) proj[j] = queries[j].first;
      } else {
        for (std::size_t j = 0; j < m; ++j) proj[j] = ref_proj(static_cast<Eigen::Index>(j), c);
        std::sort(proj.begin(), proj.end());
      }
      std::size_t below = 0;     // reference projections < x
      std::size_t at_most = 0;   // reference projections <= x
      for (const auto& [x, i] : queries) {
        while (below < m && proj[below] < x) ++below;
        if (at_most < below) at_most = below;
        while (at_most < m && proj[at_most] <= x) ++at_most;
        best[i] = std::min({best[i], at_most, m - below});
      }
    }
  }
  DepthVector out;
  out.kind = DepthKind::Halfspace;
  out.exact = false;
  out.values.resize(p);
  for (std::size_t i = 0; i < p; ++i) out.values[i] = static_cast<double>(best[i]) / static_cast<double>(m);
  return out;
}

}  // namespace

DepthVector halfspace_depth(const MatrixView& points, const MatrixView& reference, const HalfspaceOptions& options) {
  require_same_dim(points, reference);
  const auto d = reference.cols();
  switch (options.method) {
    case HalfspaceMethod::Exact:
      if (d > 2) {
        throw Error(ErrorKind::InvalidArgument, kModule, "exact halfspace depth is only available for d <= 2");
      }
      [[fallthrough]];
    case HalfspaceMethod::Auto:
      if (d == 1) return halfspace_exact_1d(points, reference);
      if (d == 2) return halfspace_exact_2d(points, reference);
      return halfspace_sampled(points, reference, options.directions, options.seed);
    case HalfspaceMethod::Sampled:
      return halfspace_sampled(points, reference, options.directions, options.seed);
  }
  return {};
}

RobustLocationScatter mcd_estimate(const MatrixView& reference, const McdOptions& options) {
  const auto m = static_cast<std::size_t>(reference.rows());
  const auto d = static_cast<std::size_t>(reference.cols());
  if (!(options.breakdown > 0.0 && options.breakdown <= 0.5)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "MCD breakdown must lie in (0, 0.5]");
  }
  if (m < 2 * (d + 1)) {
    throw Error(ErrorKind::InsufficientData, kModule,
                "MCD needs at least 2(d + 1) = " + std::to_string(2 * (d + 1)) + " points, got " + std::to_string(m));
  }
  const auto h = std::min(m, static_cast<std::size_t>(std::ceil((1.0 - options.breakdown) * static_cast<double>(m))));

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), std::size_t{0});

  std::vector<Fit> candidates;
  for (int start = 0; start < options.starts; ++start) {
    // Random (d+1)-subset, grown until its covariance is nonsingular.
    std::size_t taken = 0;
    auto draw = [&] {
      std::uniform_int_distribution<std::size_t> pick(taken, m - 1);
      std::swap(pool[taken], pool[pick(rng)]);
      ++taken;
    };
    for (std::size_t k = 0; k <= d; ++k) draw();
    Fit fit;
    std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(taken));
    while (!fit_subset(reference, subset, fit)) {
      if (taken >= h) break;
      draw();
      subset.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(taken));
    }
    if (!std::isfinite(fit.log_det)) continue;
    bool ok = true;
    for (int step = 0; step < 2 && ok; ++step) ok = c_step(reference, h, fit);
    if (ok) candidates.push_back(std::move(fit));
  }
  if (candidates.empty()) {
    throw Error(ErrorKind::DegenerateSubset, kModule, "every candidate MCD subset is rank-deficient");
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Fit& a, const Fit& b) { return a.log_det < b.log_det; });
  candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(options.keep_best)));
  Fit best;
  for (auto& fit : candidates) {
    for (int step = 0; step < options.max_csteps; ++step) {
      Fit next = fit;
      if (!c_step(reference, h, next)) break;
      const bool improved = next.log_det < fit.log_det - 1e-12;
      fit = std::move(next);
      if (!improved) break;
    }
    if (fit.log_det < best.log_det) best = fit;
  }
  if (!std::isfinite(best.log_det)) {
    throw Error(ErrorKind::DegenerateSubset, kModule, "every candidate MCD subset is rank-deficient");
  }

  const double dd = static_cast<double>(d);
  const boost::math::chi_squared chi_d(dd);
  const boost::math::chi_squared chi_d2(dd + 2.0);
  const double frac = static_cast<double>(h) / static_cast<double>(m);
  Eigen::MatrixXd raw_scatter = best.cov;
  if (frac < 1.0) {
    raw_scatter *= frac / boost::math::cdf(chi_d2, boost::math::quantile(chi_d, frac));
  }

  const double cutoff = boost::math::quantile(chi_d, 0.975);
  const auto dist = squared_distances(reference, best.mean, raw_scatter);
  RobustLocationScatter out;
  out.support_mask.assign(m, false);
  for (std::size_t i = 0; i < m; ++i) out.support_mask[i] = dist[i] <= cutoff;
  for (auto i : best.subset) out.support_mask[i] = true;

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m; ++i) {
    if (out.support_mask[i]) kept.push_back(i);
  }
  Fit reweighted;
  if (!fit_subset(reference, kept, reweighted)) {
    throw Error(ErrorKind::DegenerateSubset, kModule, "reweighted MCD scatter is singular");
  }
  const double n_kept = static_cast<double>(kept.size());
  out.location = reweighted.mean;
  out.scatter = reweighted.cov * (n_kept / (n_kept - 1.0)) * (0.975 / boost::math::cdf(chi_d2, cutoff));
  out.scatter = 0.5 * (out.scatter + out.scatter.transpose());
  return out;
}

DepthVector compute_depth(DepthKind kind, const MatrixView& points, const MatrixView& reference,
                          const DepthOptions& options) {
  switch (kind) {
    case DepthKind::Halfspace: return halfspace_depth(points, reference, options.halfspace);
    case DepthKind::Spatial: return spatial_depth(points, reference);
    case DepthKind::Mahalanobis: return mahalanobis_depth(points, reference, false);
    case DepthKind::MahalanobisMCD75: {
      McdOptions mcd = options.mcd;
      mcd.breakdown = 0.25;
      return mahalanobis_depth(points, reference, true, mcd);
    }
  }
  throw Error(ErrorKind::InvalidArgument, kModule, "unknown depth kind");
}

}  // namespace depthseg
