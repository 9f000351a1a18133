#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

template <typename Scalar>
struct HurstResult {
  Scalar h{};          // small-sample corrected estimate
  Scalar raw_slope{};  // slope of ln(R/S) on ln(w), uncorrected
  Scalar r2{};
  std::vector<Eigen::Index> windows;
  std::vector<Scalar> rescaled_range;  // mean R/S per window size
};

/// About a dozen log-spaced window sizes between 16 and n/4.
inline std::vector<Eigen::Index> default_hurst_windows(Eigen::Index n, int count = 12) {
  std::vector<Eigen::Index> out;
  const double lo = std::log(16.0), hi = std::log(static_cast<double>(n) / 4.0);
  for (int i = 0; i < count; ++i) {
    const auto w = static_cast<Eigen::Index>(std::lround(std::exp(lo + (hi - lo) * i / (count - 1))));
    if (out.empty() || w > out.back()) out.push_back(w);
  }
  return out;
}

/// Anis-Lloyd expected R/S of i.i.d. Gaussian noise in windows of size w,
/// with the Peters (w - 1/2)/w factor.
inline double expected_rescaled_range(Eigen::Index w) {
  const double n = static_cast<double>(w);
  double gamma_ratio;
  if (w <= 340)
    gamma_ratio = std::exp(std::lgamma((n - 1) / 2) - std::lgamma(n / 2)) / std::sqrt(std::numbers::pi);
  else
    gamma_ratio = 1.0 / std::sqrt(n * std::numbers::pi / 2);
  double sum = 0;
  for (Eigen::Index i = 1; i < w; ++i) sum += std::sqrt((n - static_cast<double>(i)) / static_cast<double>(i));
  return (n - 0.5) / n * gamma_ratio * sum;
}

/// Mean R/S over non-overlapping windows of size w; windows with zero
/// standard deviation are skipped. Returns NaN if every window was skipped.
template <typename Derived>
typename Derived::Scalar mean_rescaled_range(const Eigen::MatrixBase<Derived>& x, Eigen::Index w) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index blocks = x.size() / w;
  Scalar acc = 0;
  Eigen::Index used = 0;
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const auto seg = x.segment(b * w, w);
    const Scalar m = seg.mean();
    Scalar cum = 0, lo = 0, hi = 0, ss = 0;
    for (Eigen::Index i = 0; i < w; ++i) {
      const Scalar d = seg(i) - m;
      cum += d;
      lo = std::min(lo, cum);
      hi = std::max(hi, cum);
      ss += d * d;
    }
    const Scalar sd = std::sqrt(ss / static_cast<Scalar>(w));
    if (!(sd > 0)) continue;
    acc += (hi - lo) / sd;
    ++used;
  }
  return used ? acc / static_cast<Scalar>(used) : std::numeric_limits<Scalar>::quiet_NaN();
}

/// Rescaled-range Hurst exponent. The estimate regresses
/// ln(R/S) - ln E[R/S] on ln(w) and adds 1/2, removing the upward
/// small-window bias of the raw R/S slope.
template <typename Derived>
HurstResult<typename Derived::Scalar> hurst_rs(const Eigen::MatrixBase<Derived>& x,
                                               std::vector<Eigen::Index> windows = {}) {
  using Scalar = typename Derived::Scalar;
  require_size(x, 256, "hurst_rs");
  if (windows.empty()) windows = default_hurst_windows(x.size());

  HurstResult<Scalar> out;
  std::vector<Scalar> lw, lrs, lexp;
  for (Eigen::Index w : windows) {
    if (w < 4 || w > x.size()) throw DomainError("hurst_rs: window size out of range");
    const Scalar rs = mean_rescaled_range(x, w);
    if (std::isnan(rs)) continue;
    out.windows.push_back(w);
    out.rescaled_range.push_back(rs);
    lw.push_back(std::log(static_cast<Scalar>(w)));
    lrs.push_back(std::log(rs));
    lexp.push_back(static_cast<Scalar>(std::log(expected_rescaled_range(w))));
  }
  if (out.windows.empty()) throw InsufficientData("hurst_rs: every window had zero standard deviation");
  if (out.windows.size() < 4) throw InsufficientData("hurst_rs: fewer than 4 usable window sizes");

  const auto m = static_cast<Eigen::Index>(lw.size());
  const Eigen::Map<const Vector<Scalar>> vw(lw.data(), m), vrs(lrs.data(), m), vexp(lexp.data(), m);
  out.raw_slope = fit_line(vw, vrs).slope;
  const auto corrected = fit_line(vw, (vrs - vexp).eval());
  out.h = Scalar(0.5) + corrected.slope;
  out.r2 = corrected.r2;
  return out;
}

}  // namespace bfstats::stats
