#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bfstats/market/datasets.hpp"
#include "bfstats/returns/series.hpp"

namespace bfstats::returns {

struct PricePoint {
  std::int64_t t = 0;
  std::optional<double> price;
};

/// R_i = ln P_i - ln P_{i-1} over the points with a price; timestamp of P_i.
/// Fewer than two usable prices give an empty series. Throws DomainError on a
/// non-positive price, naming the tick.
ReturnSeries log_returns(std::span<const PricePoint> prices, std::string market_id = {});

/// r_i = (P_i - P_{i-1}) / P_{i-1}; same conventions as log_returns.
ReturnSeries simple_returns(std::span<const PricePoint> prices, std::string market_id = {});

enum class Conversion { log_to_simple, simple_to_log };

/// r = exp(R) - 1 or R = ln(1 + r). Throws DomainError if the series tag does
/// not match the direction or a simple return is <= -1.
ReturnSeries convert(const ReturnSeries& series, Conversion direction);

/// Element-wise |x| (kind = absolute) or x^2 (kind = squared).
ReturnSeries transform(const ReturnSeries& series, ReturnKind kind);

/// Multiply every value by `factor`; the factor is recorded on the series.
ReturnSeries scaled(const ReturnSeries& series, double factor);

using SelectionKey = std::pair<std::string, std::int64_t>;  // (market id, selection id)

/// Last-traded-price path per selection, restricted to records where ltp is
/// present and differs from the previous one. Input must be time sorted.
std::map<SelectionKey, std::vector<PricePoint>> ltp_paths(std::span<const market::RunnerChangeRecord> records);

/// Log returns of every selection in each market, merged by time (stable,
/// ties by selection id). One series per market id.
std::map<std::string, ReturnSeries> market_log_returns(std::span<const market::RunnerChangeRecord> records);

/// Time-ordered merge of several series into one tagged "combined". All
/// inputs must share one kind.
ReturnSeries concat_series(std::span<const ReturnSeries> parts);

}  // namespace bfstats::returns
