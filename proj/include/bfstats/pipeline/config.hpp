#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bfstats::pipeline {

/// Switches for the analysis battery. A disabled estimator is left out of
/// the report entirely.
struct EstimatorToggles {
  bool describe = true;
  bool hill = true;
  bool gengauss = true;
  bool ks = true;
  bool adf = true;
  bool kpss = true;
  bool acf = true;
  bool powerlaw = true;
  bool hurst = true;

  bool operator==(const EstimatorToggles&) const = default;
};

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output = "out";
  std::optional<double> commission;  // fraction; overrides every marketBaseRate
  double default_commission = 0.05;  // when a market carries no marketBaseRate
  double scale = 1.0;                // multiplies log returns before analysis
  EstimatorToggles toggles;
  std::vector<double> k_fractions{0.01, 0.02, 0.03, 0.04, 0.05, 0.10};
  std::optional<int> max_lag;  // ACF / power-law lag ceiling; default min(200, n/10)
  double ks_level = 0.05;
  std::uint64_t seed = 0;
  std::string log_level = "info";  // quiet, info, debug
  std::vector<std::string> sample_markets;  // figure markets; empty = automatic
  int threads = 0;                          // 0 = hardware concurrency

  bool operator==(const RunConfig&) const = default;

  /// Throws DomainError for a knob outside its documented range.
  void validate() const;
};

/// Key-value text form (INI/TOML subset, `[estimators]` section for toggles).
std::string to_config_text(const RunConfig& config);

/// Inverse of to_config_text. Unknown keys raise ParseError; missing keys keep
/// their defaults.
RunConfig parse_config_text(const std::string& text);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace bfstats::pipeline
