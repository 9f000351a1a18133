#pragma once

#include <cmath>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

/// Sample moments. `std` uses the n-1 denominator; skewness and kurtosis are
/// the moment ratios m3/m2^1.5 and m4/m2^2 (Pearson, normal = 3).
template <typename Scalar>
struct DescriptiveStats {
  Eigen::Index n = 0;
  Scalar mean{};
  Scalar std{};
  Scalar skewness{};
  Scalar kurtosis{};
  Scalar cv{};  // mean / std
};

template <typename Derived>
DescriptiveStats<typename Derived::Scalar> describe(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  require_size(x, 4, "describe");

  DescriptiveStats<Scalar> d;
  d.n = x.size();
  const Scalar n = static_cast<Scalar>(d.n);
  d.mean = x.mean();
  const auto c = (x.array() - d.mean).eval();
  const Scalar m2 = c.square().sum() / n;
  if (!(m2 > 0)) throw DomainError("describe: zero variance, skewness and kurtosis undefined");
  const Scalar m3 = c.cube().sum() / n;
  const Scalar m4 = c.square().square().sum() / n;

  d.std = std::sqrt(m2 * n / (n - 1));
  d.skewness = m3 / std::pow(m2, Scalar(1.5));
  d.kurtosis = m4 / (m2 * m2);
  d.cv = d.mean / d.std;
  return d;
}

}  // namespace bfstats::stats
