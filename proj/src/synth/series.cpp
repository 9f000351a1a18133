#include "bfstats/synth/series.hpp"

#include <cmath>
#include <numeric>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/laplace_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "bfstats/errors.hpp"

namespace bfstats::synth {

namespace {

constexpr int kGarchBurnIn = 1000;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("generate_series: " + what);
}

}  // namespace

Family family_from_string(const std::string& name) {
  static const std::map<std::string, Family> table{
      {"gaussian", Family::gaussian},   {"laplace", Family::laplace},
      {"generalized_gaussian", Family::generalized_gaussian},
      {"pareto", Family::pareto},       {"student_t", Family::student_t},
      {"ar1", Family::ar1},             {"random_walk", Family::random_walk},
      {"garch11", Family::garch11}};
  auto it = table.find(name);
  if (it == table.end()) throw DomainError("unknown generator family '" + name + "'");
  return it->second;
}

const char* to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::laplace: return "laplace";
    case Family::generalized_gaussian: return "generalized_gaussian";
    case Family::pareto: return "pareto";
    case Family::student_t: return "student_t";
    case Family::ar1: return "ar1";
    case Family::random_walk: return "random_walk";
    case Family::garch11: return "garch11";
  }
  return "unknown";
}

returns::ReturnSeries generate_series(const GeneratorSpec& spec) {
  Engine rng(spec.seed);
  const auto n = static_cast<Eigen::Index>(spec.n);
  Eigen::VectorXd x(n);
  boost::random::normal_distribution<double> z(0.0, 1.0);

  switch (spec.family) {
    case Family::gaussian: {
      const double mu = spec.param("mu", 0.0), sigma = spec.param("sigma", 1.0);
      require(sigma > 0, "sigma must be positive");
      for (Eigen::Index i = 0; i < n; ++i) x(i) = mu + sigma * z(rng);
      break;
    }
    case Family::laplace: {
      const double mu = spec.param("mu", 0.0), scale = spec.param("scale", 1.0);
      require(scale > 0, "scale must be positive");
      boost::random::laplace_distribution<double> d(mu, scale);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = d(rng);
      break;
    }
    case Family::generalized_gaussian: {
      // |x - mu| / scale = G^(1/beta) with G ~ Gamma(1/beta, 1); random sign.
      const double mu = spec.param("mu", 0.0), scale = spec.param("scale", 1.0), beta = spec.param("beta", 2.0);
      require(scale > 0 && beta > 0, "scale and beta must be positive");
      boost::random::gamma_distribution<double> g(1.0 / beta, 1.0);
      boost::random::uniform_01<double> u;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = scale * std::pow(g(rng), 1.0 / beta);
        x(i) = mu + (u(rng) < 0.5 ? -mag : mag);
      }
      break;
    }
    case Family::pareto: {
      const double alpha = spec.param("alpha", 3.0), xm = spec.param("xm", 1.0);
      require(alpha > 0 && xm > 0, "alpha and xm must be positive");
      boost::random::uniform_01<double> u;
      for (Eigen::Index i = 0; i < n; ++i) x(i) = xm * std::pow(1.0 - u(rng), -1.0 / alpha);
      break;
    }
    case Family::student_t: {
      const double nu = spec.param("nu", 4.0);
      require(nu > 0, "nu must be positive");
      boost::random::student_t_distribution<double> d(nu);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = d(rng);
      break;
    }
    case Family::ar1: {
      const double phi = spec.param("phi", 0.0), sigma = spec.param("sigma", 1.0);
      require(std::abs(phi) < 1, "|phi| must be below 1");
      require(sigma > 0, "sigma must be positive");
      double prev = sigma * z(rng) / std::sqrt(1 - phi * phi);  // stationary start
      for (Eigen::Index i = 0; i < n; ++i) {
        prev = phi * prev + sigma * z(rng);
        x(i) = prev;
      }
      break;
    }
    case Family::random_walk: {
      const double sigma = spec.param("sigma", 1.0), drift = spec.param("drift", 0.0);
      require(sigma > 0, "sigma must be positive");
      double level = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        level += drift + sigma * z(rng);
        x(i) = level;
      }
      break;
    }
    case Family::garch11: {
      const double omega = spec.param("omega", 1e-5), a1 = spec.param("a1", 0.1), b1 = spec.param("b1", 0.85);
      require(omega > 0 && a1 >= 0 && b1 >= 0, "omega must be positive, a1 and b1 non-negative");
      require(a1 + b1 < 1, "a1 + b1 must be below 1 for stationarity");
      double var = omega / (1 - a1 - b1);
      double eps = 0;
      for (Eigen::Index i = -kGarchBurnIn; i < n; ++i) {
        var = omega + a1 * eps * eps + b1 * var;
        eps = std::sqrt(var) * z(rng);
        if (i >= 0) x(i) = eps;
      }
      break;
    }
  }

  returns::ReturnSeries s;
  s.market_id = to_string(spec.family);
  s.values = std::move(x);
  s.t.resize(spec.n);
  std::iota(s.t.begin(), s.t.end(), std::int64_t{0});
  s.kind = returns::ReturnKind::raw;
  return s;
}

}  // namespace bfstats::synth
