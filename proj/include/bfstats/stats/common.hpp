#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "bfstats/errors.hpp"

namespace bfstats::stats {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Outcome of a hypothesis test. `reject` is evaluated at `level`.
struct StatTestResult {
  std::string test;
  double statistic = 0.0;
  std::map<std::string, double> critical_values;  // "1%", "5%", "10%" ...
  double p_value = 1.0;
  double level = 0.05;
  bool reject = false;
  Eigen::Index nobs = 0;
  std::optional<int> lags;
};

inline std::string level_key(double level) {
  const double pct = level * 100.0;
  const double rounded = std::round(pct * 10.0) / 10.0;
  std::string s = std::to_string(rounded);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s + "%";
}

template <typename Derived>
void require_size(const Eigen::DenseBase<Derived>& x, Eigen::Index need, const char* op) {
  if (x.size() < need)
    throw InsufficientData(op, static_cast<std::size_t>(x.size()), static_cast<std::size_t>(need));
}

/// Sorted copy as a plain vector of the same scalar type.
template <typename Derived>
Vector<typename Derived::Scalar> sorted_copy(const Eigen::DenseBase<Derived>& x) {
  Vector<typename Derived::Scalar> s = x.derived();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

/// Straight-line least squares y = intercept + slope * x.
template <typename Scalar>
struct LineFit {
  Scalar slope{};
  Scalar intercept{};
  Scalar r2{};
};

template <typename DX, typename DY>
LineFit<typename DX::Scalar> fit_line(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  using Scalar = typename DX::Scalar;
  const Eigen::Index n = x.size();
  const Scalar mx = x.mean();
  const Scalar my = y.mean();
  const auto dx = (x.array() - mx).eval();
  const auto dy = (y.array() - my).eval();
  const Scalar sxx = dx.square().sum();
  if (n < 2 || !(sxx > 0)) throw DomainError("fit_line: regressor has no spread");
  LineFit<Scalar> fit;
  fit.slope = (dx * dy).sum() / sxx;
  fit.intercept = my - fit.slope * mx;
  const Scalar sst = dy.square().sum();
  const Scalar sse = (dy - fit.slope * dx).square().sum();
  // Zero total variation means the line reproduces y exactly.
  fit.r2 = sst > 0 ? Scalar(1) - sse / sst : Scalar(1);
  return fit;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace bfstats::stats
