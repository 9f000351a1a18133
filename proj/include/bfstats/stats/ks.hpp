#pragma once

#include <cmath>
#include <numbers>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

/// c(alpha) in D_c = c(alpha) sqrt((n_a + n_b) / (n_a n_b)). The customary
/// rounded constants are used at 10%, 5% and 1%; other levels use the
/// asymptotic inverse sqrt(-ln(alpha/2) / 2).
inline double ks_c_alpha(double level) {
  if (!(level > 0 && level < 1)) throw DomainError("ks: level must lie in (0, 1)");
  if (std::abs(level - 0.10) < 1e-12) return 1.224;
  if (std::abs(level - 0.05) < 1e-12) return 1.358;
  if (std::abs(level - 0.01) < 1e-12) return 1.628;
  return std::sqrt(-std::log(level / 2) / 2);
}

inline double ks_critical_value(double level, std::size_t n_a, std::size_t n_b) {
  const double na = static_cast<double>(n_a), nb = static_cast<double>(n_b);
  return ks_c_alpha(level) * std::sqrt((na + nb) / (na * nb));
}

/// Survival function of the Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_sf(double lambda) {
  if (lambda <= 0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // The alternating series needs many terms here; the theta-dual form converges in a few.
    const double w = -pi * pi / (8 * lambda * lambda);
    double cdf = 0;
    for (int j = 1; j <= 100; ++j) {
      const double term = std::exp(w * (2 * j - 1) * (2 * j - 1));
      cdf += term;
      if (term < 1e-300) break;
    }
    cdf *= std::sqrt(2 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? term : -term);
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

/// sup_x |F_a(x) - F_b(x)| over the pooled sample, right-continuous ECDFs.
template <typename DA, typename DB>
typename DA::Scalar ks_statistic(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  const Vector<Scalar> sa = sorted_copy(a);
  const Vector<Scalar> sb = sorted_copy(b);
  const Eigen::Index na = sa.size(), nb = sb.size();
  Eigen::Index i = 0, j = 0;
  Scalar d = 0;
  while (i < na && j < nb) {
    const Scalar x = std::min(sa(i), sb(j));
    while (i < na && sa(i) == x) ++i;
    while (j < nb && sb(j) == x) ++j;
    const Scalar diff = std::abs(static_cast<Scalar>(i) / na - static_cast<Scalar>(j) / nb);
    d = std::max(d, diff);
  }
  return d;
}

template <typename DA, typename DB>
StatTestResult ks_two_sample(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b, double level = 0.05) {
  if (a.size() == 0 || b.size() == 0) throw InsufficientData("ks_two_sample: empty sample");
  require_size(a, 10, "ks_two_sample");
  require_size(b, 10, "ks_two_sample");

  const auto na = static_cast<std::size_t>(a.size());
  const auto nb = static_cast<std::size_t>(b.size());
  StatTestResult r;
  r.test = "ks_two_sample";
  r.level = level;
  r.nobs = a.size() + b.size();
  r.statistic = static_cast<double>(ks_statistic(a, b));
  for (double l : {0.10, 0.05, 0.01}) r.critical_values[level_key(l)] = ks_critical_value(l, na, nb);
  r.critical_values[level_key(level)] = ks_critical_value(level, na, nb);
  const double n_eff = static_cast<double>(na) * static_cast<double>(nb) / static_cast<double>(na + nb);
  r.p_value = kolmogorov_sf(std::sqrt(n_eff) * r.statistic);
  r.reject = r.statistic > ks_critical_value(level, na, nb);
  return r;
}

}  // namespace bfstats::stats
