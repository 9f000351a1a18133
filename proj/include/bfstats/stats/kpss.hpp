#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

/// Newey-West automatic bandwidth floor(4 (n/100)^(2/9)).
inline int newey_west_bandwidth(Eigen::Index n) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

/// Level-stationarity critical values.
inline constexpr std::array<std::pair<double, double>, 4> kKpssLevelTable{{
    {0.10, 0.347},
    {0.05, 0.463},
    {0.025, 0.574},
    {0.01, 0.739},
}};

inline double kpss_critical_value(double level) {
  for (const auto& [l, cv] : kKpssLevelTable)
    if (std::abs(l - level) < 1e-12) return cv;
  throw DomainError("kpss: critical values tabulated at 10%, 5%, 2.5% and 1% only");
}

/// Linear interpolation in the critical-value table, clipped to [0.01, 0.10].
inline double kpss_p_value(double stat) {
  const auto& t = kKpssLevelTable;
  if (stat <= t.front().second) return t.front().first;
  if (stat >= t.back().second) return t.back().first;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const auto [p0, c0] = t[i];
    const auto [p1, c1] = t[i + 1];
    if (stat <= c1) return p0 + (stat - c0) * (p1 - p0) / (c1 - c0);
  }
  return t.back().first;
}

/// Bartlett-kernel long-run variance of an already-demeaned series.
template <typename Derived>
typename Derived::Scalar bartlett_long_run_variance(const Eigen::MatrixBase<Derived>& e, int bandwidth) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = e.size();
  Scalar s2 = e.squaredNorm();
  for (int s = 1; s <= bandwidth && s < n; ++s) {
    const Scalar w = Scalar(1) - static_cast<Scalar>(s) / static_cast<Scalar>(bandwidth + 1);
    s2 += Scalar(2) * w * e.tail(n - s).dot(e.head(n - s));
  }
  return s2 / static_cast<Scalar>(n);
}

/// KPSS level-stationarity test: eta = n^-2 sum S_t^2 / s^2(l).
template <typename Derived>
StatTestResult kpss(const Eigen::MatrixBase<Derived>& y, std::optional<int> bandwidth = std::nullopt,
                    double level = 0.05) {
  using Scalar = typename Derived::Scalar;
  require_size(y, 50, "kpss");
  const Eigen::Index n = y.size();
  const int l = bandwidth.value_or(newey_west_bandwidth(n));

  const Vector<Scalar> e = (y.array() - y.mean()).matrix();
  const Scalar lrv = bartlett_long_run_variance(e, l);
  if (!(lrv > 0)) throw DomainError("kpss: zero long-run variance");

  Scalar partial = 0, sum_sq = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    partial += e(t);
    sum_sq += partial * partial;
  }
  const Scalar nn = static_cast<Scalar>(n);

  StatTestResult r;
  r.test = "kpss";
  r.level = level;
  r.nobs = n;
  r.lags = l;
  r.statistic = static_cast<double>(sum_sq / (nn * nn) / lrv);
  for (const auto& [lv, cv] : kKpssLevelTable) r.critical_values[level_key(lv)] = cv;
  r.p_value = kpss_p_value(r.statistic);
  r.reject = r.statistic > kpss_critical_value(level);
  return r;
}

}  // namespace bfstats::stats
