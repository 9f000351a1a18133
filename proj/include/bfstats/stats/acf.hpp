#pragma once

#include <algorithm>
#include <cmath>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

template <typename Scalar>
struct AcfResult {
  Vector<Scalar> rho;  // rho(0..max_lag)
  Scalar band{};       // 1.96 / sqrt(n)
};

/// rho(tau) = sum_t (x_t - m)(x_{t+tau} - m) / sum_t (x_t - m)^2
template <typename Derived>
AcfResult<typename Derived::Scalar> acf(const Eigen::MatrixBase<Derived>& x, Eigen::Index max_lag) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  if (max_lag < 0 || 2 * max_lag >= n)
    throw InsufficientData("acf: max_lag must be below n/2 (n=" + std::to_string(n) + ", max_lag=" +
                           std::to_string(max_lag) + ")");
  const Vector<Scalar> c = (x.array() - x.mean()).matrix();
  const Scalar denom = c.squaredNorm();
  if (!(denom > 0)) throw DomainError("acf: zero variance");

  AcfResult<Scalar> out;
  out.rho.resize(max_lag + 1);
  out.rho(0) = Scalar(1);
  for (Eigen::Index tau = 1; tau <= max_lag; ++tau) out.rho(tau) = c.head(n - tau).dot(c.tail(n - tau)) / denom;
  out.band = Scalar(1.96) / std::sqrt(static_cast<Scalar>(n));
  return out;
}

template <typename Scalar>
struct PowerLawFit {
  Scalar alpha{};      // decay exponent, max(0, -slope)
  Scalar slope{};      // d ln rho / d ln tau
  Scalar intercept{};  // ln rho at tau = 1
  Scalar r2{};
  Eigen::Index lag_min = 0;
  Eigen::Index lag_max = 0;
  Eigen::Index used = 0;
  Eigen::Index excluded = 0;  // lags with rho <= 0

  Scalar fitted(Scalar tau) const { return std::exp(intercept + slope * std::log(tau)); }
};

/// Default lag ceiling min(200, n/10).
inline Eigen::Index default_powerlaw_lag(Eigen::Index n) { return std::min<Eigen::Index>(200, n / 10); }

/// OLS of ln rho(tau) on ln tau over tau in [1, max_lag] where rho > 0.
/// `rho` is indexed by lag, rho(0) is ignored.
template <typename Derived>
PowerLawFit<typename Derived::Scalar> fit_powerlaw_acf(const Eigen::MatrixBase<Derived>& rho, Eigen::Index max_lag) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index hi = std::min(max_lag, rho.size() - 1);
  Vector<Scalar> lx(std::max<Eigen::Index>(hi, 0)), ly(std::max<Eigen::Index>(hi, 0));
  PowerLawFit<Scalar> fit;
  fit.lag_min = 1;
  fit.lag_max = hi;
  Eigen::Index m = 0;
  for (Eigen::Index tau = 1; tau <= hi; ++tau) {
    if (rho(tau) > 0) {
      lx(m) = std::log(static_cast<Scalar>(tau));
      ly(m) = std::log(rho(tau));
      ++m;
    } else {
      ++fit.excluded;
    }
  }
  if (m < 5) throw InsufficientData("fit_powerlaw_acf: fewer than 5 lags with positive autocorrelation");
  const auto line = fit_line(lx.head(m), ly.head(m));
  fit.used = m;
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.r2 = line.r2;
  fit.alpha = std::max(Scalar(0), -line.slope);
  return fit;
}

}  // namespace bfstats::stats
