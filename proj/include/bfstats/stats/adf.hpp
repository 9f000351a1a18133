#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

/// Schwert rule: floor(12 (n/100)^(1/4)).
inline int schwert_lags(Eigen::Index n) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/// Dickey-Fuller critical value for the constant-only regression from the
/// MacKinnon (2010) response surface. `nobs` = 0 gives the asymptotic value.
inline double adf_critical_value(double level, Eigen::Index nobs = 0) {
  static constexpr std::array<std::array<double, 4>, 3> surface{{
      {-3.43035, -6.5393, -16.786, -79.433},  // 1%
      {-2.86154, -2.8903, -4.234, -40.040},   // 5%
      {-2.56677, -1.5384, -2.809, 0.0},       // 10%
  }};
  std::size_t row;
  if (std::abs(level - 0.01) < 1e-12) row = 0;
  else if (std::abs(level - 0.05) < 1e-12) row = 1;
  else if (std::abs(level - 0.10) < 1e-12) row = 2;
  else throw DomainError("adf: critical values tabulated at 1%, 5% and 10% only");
  const auto& b = surface[row];
  if (nobs <= 0) return b[0];
  const double inv = 1.0 / static_cast<double>(nobs);
  return b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
}

/// MacKinnon (1994) approximate asymptotic p-value, constant-only, one regressor.
inline double adf_p_value(double tau) {
  constexpr double tau_max = 2.74, tau_min = -18.83, tau_star = -1.61;
  if (tau > tau_max) return 1.0;
  if (tau < tau_min) return 0.0;
  double z;
  if (tau <= tau_star)
    z = 2.1659 + tau * (1.4412 + tau * 0.038269);
  else
    z = 1.7339 + tau * (0.93202 + tau * (-0.12745 + tau * -0.010368));
  return normal_cdf(z);
}

/// Augmented Dickey-Fuller test, constant-only regression:
///   dy_t = c + gamma y_{t-1} + sum_{i=1..p} phi_i dy_{t-i} + e_t
/// The statistic is the t-ratio of gamma. `max_lag` defaults to the Schwert rule.
template <typename Derived>
StatTestResult adf(const Eigen::MatrixBase<Derived>& y, std::optional<int> max_lag = std::nullopt,
                   double level = 0.05) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_size(y, 50, "adf");

  const Eigen::Index n = y.size();
  const int p = max_lag.value_or(schwert_lags(n));
  if (p < 0) throw DomainError("adf: lag order must be non-negative");
  const Eigen::Index k = 2 + p;
  const Eigen::Index nobs = n - 1 - p;
  if (nobs < k + 10) throw InsufficientData("adf: series too short for lag order " + std::to_string(p));

  const Vector<Scalar> dy = y.tail(n - 1) - y.head(n - 1);  // dy(i) = y(i+1) - y(i)
  Mat X(nobs, k);
  Vector<Scalar> target(nobs);
  for (Eigen::Index r = 0; r < nobs; ++r) {
    const Eigen::Index t = r + p + 1;  // index into y
    target(r) = dy(t - 1);
    X(r, 0) = Scalar(1);
    X(r, 1) = y(t - 1);
    for (int i = 1; i <= p; ++i) X(r, 1 + i) = dy(t - 1 - i);
  }

  Eigen::ColPivHouseholderQR<Mat> qr(X);
  if (qr.rank() < k) throw DomainError("adf: rank-deficient regression");
  const Vector<Scalar> beta = qr.solve(target);
  const Vector<Scalar> resid = target - X * beta;
  const Scalar sigma2 = resid.squaredNorm() / static_cast<Scalar>(nobs - k);
  const Mat xtx = X.transpose() * X;
  const Mat cov = xtx.ldlt().solve(Mat::Identity(k, k));
  const Scalar se = std::sqrt(sigma2 * cov(1, 1));

  StatTestResult r;
  r.test = "adf";
  r.level = level;
  r.nobs = nobs;
  r.lags = p;
  r.statistic = static_cast<double>(beta(1) / se);
  for (double l : {0.01, 0.05, 0.10}) r.critical_values[level_key(l)] = adf_critical_value(l, nobs);
  r.p_value = adf_p_value(r.statistic);
  r.reject = r.statistic < adf_critical_value(level, nobs);
  return r;
}

}  // namespace bfstats::stats
