#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "bfstats/stats/common.hpp"

namespace bfstats::stats {

/// f(x) = beta / (2 scale Gamma(1/beta)) exp(-(|x - mu| / scale)^beta)
template <typename Scalar>
Scalar gg_pdf(Scalar x, Scalar mu, Scalar scale, Scalar beta) {
  if (!(scale > 0) || !(beta > 0)) throw DomainError("gg_pdf: scale and beta must be positive");
  const Scalar z = std::abs(x - mu) / scale;
  return beta / (Scalar(2) * scale * std::tgamma(Scalar(1) / beta)) * std::exp(-std::pow(z, beta));
}

template <typename Derived>
Vector<typename Derived::Scalar> gg_pdf(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar mu,
                                        typename Derived::Scalar scale, typename Derived::Scalar beta) {
  using Scalar = typename Derived::Scalar;
  if (!(scale > 0) || !(beta > 0)) throw DomainError("gg_pdf: scale and beta must be positive");
  const Scalar norm = beta / (Scalar(2) * scale * std::tgamma(Scalar(1) / beta));
  return (norm * (-((x.array() - mu).abs() / scale).pow(beta)).exp()).matrix();
}

enum class GGMethod { sse, mle };

inline const char* to_string(GGMethod m) { return m == GGMethod::sse ? "sse" : "mle"; }

template <typename Scalar>
struct GGFit {
  Scalar mu{};
  Scalar scale{};
  Scalar beta{};
  Scalar sse{};  // histogram sum of squared density errors
  GGMethod method = GGMethod::sse;
};

/// Density histogram over [min, max].
template <typename Scalar>
struct Histogram {
  Vector<Scalar> centers;
  Vector<Scalar> density;
  Scalar width{};
};

/// Freedman-Diaconis bin width, never fewer than `min_bins` bins.
template <typename Derived>
Histogram<typename Derived::Scalar> density_histogram(const Eigen::MatrixBase<Derived>& x, Eigen::Index min_bins = 50,
                                                      Eigen::Index max_bins = 5000) {
  using Scalar = typename Derived::Scalar;
  require_size(x, 2, "density_histogram");
  const Vector<Scalar> s = sorted_copy(x);
  const Eigen::Index n = s.size();
  const Scalar lo = s(0);
  const Scalar hi = s(n - 1);
  if (!(hi > lo)) throw DomainError("density_histogram: degenerate data, all values fall in one bin");

  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto i = static_cast<Eigen::Index>(std::floor(pos));
    const Scalar frac = static_cast<Scalar>(pos - static_cast<double>(i));
    return i + 1 < n ? s(i) + frac * (s(i + 1) - s(i)) : s(i);
  };
  const Scalar iqr = quantile(0.75) - quantile(0.25);
  Eigen::Index bins = min_bins;
  if (iqr > 0) {
    const Scalar h = Scalar(2) * iqr / std::cbrt(static_cast<Scalar>(n));
    bins = std::clamp(static_cast<Eigen::Index>(std::ceil((hi - lo) / h)), min_bins, max_bins);
  }

  Histogram<Scalar> hist;
  hist.width = (hi - lo) / static_cast<Scalar>(bins);
  hist.centers.resize(bins);
  hist.density = Vector<Scalar>::Zero(bins);
  for (Eigen::Index b = 0; b < bins; ++b) hist.centers(b) = lo + (static_cast<Scalar>(b) + Scalar(0.5)) * hist.width;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto b = static_cast<Eigen::Index>((s(i) - lo) / hist.width);
    hist.density(std::min(b, bins - 1)) += 1;
  }
  const Eigen::Index occupied = (hist.density.array() > 0).count();
  if (occupied < 2) throw DomainError("density_histogram: degenerate data, all values fall in one bin");
  hist.density /= static_cast<Scalar>(n) * hist.width;
  return hist;
}

namespace detail {

template <typename Scalar>
Scalar median_of_sorted(const Vector<Scalar>& s) {
  const Eigen::Index n = s.size();
  return n % 2 ? s(n / 2) : (s(n / 2 - 1) + s(n / 2)) / Scalar(2);
}

// Closed-form maximum-likelihood scale for fixed location and shape.
template <typename Scalar>
Scalar profile_scale(const Vector<Scalar>& x, Scalar mu, Scalar beta) {
  const Scalar mean_pow = (x.array() - mu).abs().pow(beta).mean();
  return std::pow(beta * mean_pow, Scalar(1) / beta);
}

template <typename Scalar, typename Objective>
Scalar golden_section(Objective&& f, Scalar a, Scalar b, Scalar tol) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - 1) / 2;
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

// Coarse grid over beta, then golden-section refinement around the best cell.
template <typename Scalar, typename Objective>
Scalar minimize_over_beta(Objective&& f, Scalar lo, Scalar hi, Scalar step) {
  Scalar best = lo;
  Scalar best_val = f(lo);
  for (Scalar b = lo + step; b <= hi + step / 2; b += step) {
    const Scalar v = f(b);
    if (v < best_val) {
      best_val = v;
      best = b;
    }
  }
  const Scalar a = std::max(lo, best - step);
  const Scalar c = std::min(hi, best + step);
  return golden_section<Scalar>(f, a, c, Scalar(1e-5));
}

}  // namespace detail

/// Fit a generalized Gaussian. For each trial beta the location is the sample
/// median and the scale its closed-form MLE; beta then minimizes either the
/// histogram SSE (`GGMethod::sse`) or the negative log-likelihood.
template <typename Derived>
GGFit<typename Derived::Scalar> fit_gg(const Eigen::MatrixBase<Derived>& x, GGMethod method = GGMethod::sse,
                                       typename Derived::Scalar beta_lo = 0.5,
                                       typename Derived::Scalar beta_hi = 4.0) {
  using Scalar = typename Derived::Scalar;
  require_size(x, 1000, "fit_gg");
  const Vector<Scalar> data = x;
  const Histogram<Scalar> hist = density_histogram(data);
  const Scalar mu = detail::median_of_sorted(sorted_copy(data));
  const Scalar n = static_cast<Scalar>(data.size());

  auto sse_at = [&](Scalar beta) {
    const Scalar scale = detail::profile_scale(data, mu, beta);
    return (hist.density - gg_pdf(hist.centers, mu, scale, beta)).squaredNorm();
  };
  auto nll_at = [&](Scalar beta) {
    const Scalar scale = detail::profile_scale(data, mu, beta);
    return -n * (std::log(beta) - std::log(Scalar(2) * scale) - std::lgamma(Scalar(1) / beta)) + n / beta;
  };

  GGFit<Scalar> fit;
  fit.method = method;
  fit.mu = mu;
  fit.beta = method == GGMethod::sse ? detail::minimize_over_beta(sse_at, beta_lo, beta_hi, Scalar(0.05))
                                     : detail::minimize_over_beta(nll_at, beta_lo, beta_hi, Scalar(0.05));
  fit.scale = detail::profile_scale(data, mu, fit.beta);
  fit.sse = sse_at(fit.beta);
  return fit;
}

}  // namespace bfstats::stats
