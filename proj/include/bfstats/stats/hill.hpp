#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

template <typename Scalar>
struct HillPoint {
  double k_fraction = 0.0;
  Eigen::Index k_count = 0;
  std::optional<Scalar> estimate;    // H(k)
  std::optional<Scalar> tail_index;  // 1 / H(k)
  std::optional<std::string> error;
};

template <typename Scalar>
using HillCurve = std::vector<HillPoint<Scalar>>;

inline const std::vector<double>& default_hill_fractions() {
  static const std::vector<double> f{0.01, 0.02, 0.03, 0.04, 0.05, 0.10};
  return f;
}

/// |x| with exact zeros removed: the upper-tail magnitudes the Hill estimator runs on.
template <typename Derived>
Vector<typename Derived::Scalar> tail_magnitudes(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out(x.size());
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) != Scalar(0)) out(m++) = std::abs(x(i));
  out.conservativeResize(m);
  return out;
}

/// H(k) = (1/k) sum_{i=0}^{k-1} ln(X(n-i) / X(n-k)) on ascending `sorted`.
template <typename Derived>
typename Derived::Scalar hill_sorted(const Eigen::MatrixBase<Derived>& sorted, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = sorted.size();
  if (k < 2) throw InsufficientData("hill: k must be at least 2");
  if (k >= n) throw InsufficientData("hill", static_cast<std::size_t>(n), static_cast<std::size_t>(k + 1));
  const Scalar threshold = sorted(n - 1 - k);
  if (!(sorted(0) > 0)) throw DomainError("hill: data must be strictly positive");
  const Scalar log_threshold = std::log(threshold);
  Scalar acc = 0;
  for (Eigen::Index i = 0; i < k; ++i) acc += std::log(sorted(n - 1 - i)) - log_threshold;
  return acc / static_cast<Scalar>(k);
}

template <typename Derived>
typename Derived::Scalar hill(const Eigen::MatrixBase<Derived>& x, Eigen::Index k) {
  return hill_sorted(sorted_copy(x), k);
}

/// Hill estimates over fractions of the sample size; k = floor(fraction * n).
template <typename Derived>
HillCurve<typename Derived::Scalar> hill_curve(const Eigen::MatrixBase<Derived>& x,
                                               const std::vector<double>& fractions = default_hill_fractions()) {
  using Scalar = typename Derived::Scalar;
  if ((x.array() <= Scalar(0)).any()) throw DomainError("hill: data must be strictly positive");
  const Vector<Scalar> sorted = sorted_copy(x);
  const Eigen::Index n = sorted.size();

  HillCurve<Scalar> curve;
  for (double f : fractions) {
    HillPoint<Scalar> p;
    p.k_fraction = f;
    p.k_count = static_cast<Eigen::Index>(std::floor(f * static_cast<double>(n)));
    try {
      const Scalar h = hill_sorted(sorted, p.k_count);
      p.estimate = h;
      p.tail_index = h > 0 ? Scalar(1) / h : std::numeric_limits<Scalar>::infinity();
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    curve.push_back(p);
  }
  return curve;
}

}  // namespace bfstats::stats
