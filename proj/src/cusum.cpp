#include "depthseg/cusum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace depthseg {

CusumProfile cusum_profile(std::span<const std::uint32_t> ranks, const Span& span) {
  const auto m = ranks.size();
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "cusum", "CUSUM needs at least two ranks");
  const double md = static_cast<double>(m);
  const double centre = (md + 1.0) / 2.0;
  const double scale = 1.0 / (std::sqrt(md) * std::sqrt((md * md - 1.0) / 12.0));

  CusumProfile out;
  out.span = span;
  out.z.resize(m - 1);
  double running = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    running += static_cast<double>(ranks[i]) - centre;
    const double z = running * scale;
    out.z[i] = z;
    if (std::abs(z) > out.max_abs) {
      out.max_abs = std::abs(z);
      out.argmax_m = i + 1;
    }
  }
  return out;
}

CusumProfile cusum_profile(const RankVector& ranks) { return cusum_profile(ranks.ranks, ranks.span); }

SingleChange single_change_estimate(const CusumProfile& profile) {
  return {profile.span.s + profile.argmax_m - 1, profile.max_abs};
}

double sup_bridge_pvalue(double x) {
  if (!(x > 0.0)) return 1.0;
  double p;
  if (x < 1.0) {
    // Theta-function form converges fast for small x:
    // P(sup <= x) = sqrt(2 pi)/x sum_k exp(-(2k-1)^2 pi^2 / (8 x^2)).
    double cdf = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * std::numbers::pi * std::numbers::pi / (8.0 * x * x));
      cdf += term;
      if (term < 1e-16) break;
    }
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * cdf;
  } else {
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double term = std::exp(-2.0 * k * k * x * x);
      sum += (k % 2 == 1 ? term : -term);
      if (term < 1e-12) break;
    }
    p = 2.0 * sum;
  }
  return std::clamp(p, 0.0, 1.0);
}

double sup_bridge_quantile(double p) {
  double lo = 0.0;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sup_bridge_pvalue(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace depthseg
