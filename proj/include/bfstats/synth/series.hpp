#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "bfstats/returns/series.hpp"

namespace bfstats::synth {

/// The one pseudorandom engine used across the project. Draws are produced
/// by Boost.Random distributions on top of it so that a seed gives the same
/// numbers on every platform.
using Engine = std::mt19937_64;

enum class Family { gaussian, laplace, generalized_gaussian, pareto, student_t, ar1, random_walk, garch11 };

Family family_from_string(const std::string& name);
const char* to_string(Family f);

/// Family parameters by name. Missing entries take the documented defaults:
///   gaussian             mu=0 sigma=1
///   laplace              mu=0 scale=1
///   generalized_gaussian mu=0 scale=1 beta=2
///   pareto               alpha=3 xm=1
///   student_t            nu=4
///   ar1                  phi=0 sigma=1
///   random_walk          sigma=1 drift=0
///   garch11              omega=1e-5 a1=0.1 b1=0.85   (a1 + b1 < 1)
struct GeneratorSpec {
  Family family = Family::gaussian;
  std::map<std::string, double> params;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  double param(const std::string& name, double fallback) const {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
  }
};

/// Deterministic draw of `spec.n` values, tagged raw, timestamps 0..n-1.
/// Throws DomainError for invalid parameters.
returns::ReturnSeries generate_series(const GeneratorSpec& spec);

}  // namespace bfstats::synth
