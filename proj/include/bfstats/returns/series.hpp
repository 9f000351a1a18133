#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bfstats::returns {

enum class ReturnKind { log, simple, absolute, squared, raw };

const char* to_string(ReturnKind kind);

/// Timestamped return values for one market, or "combined" for a pooled series.
struct ReturnSeries {
  std::string market_id;
  std::vector<std::int64_t> t;  // ms since epoch, non-decreasing
  Eigen::VectorXd values;
  ReturnKind kind = ReturnKind::raw;
  double scale = 1.0;

  Eigen::Index size() const { return values.size(); }
};

}  // namespace bfstats::returns
