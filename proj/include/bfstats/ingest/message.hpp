#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bfstats::ingest {

/// One ladder level. Wire form is a two-element array [price, size].
struct PriceSize {
  double price = 0.0;
  double size = 0.0;
  bool operator==(const PriceSize&) const = default;
};

using PriceLadder = std::vector<PriceSize>;

inline constexpr double kMinOdds = 1.01;
inline constexpr double kMaxOdds = 1000.0;

/// Runner entry nested in a market definition.
struct RunnerDefinition {
  std::int64_t id = 0;
  std::optional<std::string> name;
  std::optional<std::string> status;
  std::optional<std::int64_t> sort_priority;
  std::optional<std::string> removal_date;
  std::optional<double> adjustment_factor;
  std::optional<double> bsp;
  std::optional<double> hc;
  bool operator==(const RunnerDefinition&) const = default;
};

/// Market definition payload. Every field is optional on the wire.
struct MarketDefinitionMsg {
  std::optional<std::string> venue;
  std::optional<bool> bsp_market;
  std::optional<bool> turn_in_play_enabled;
  std::optional<bool> persistence_enabled;
  std::optional<double> market_base_rate;  // percent
  std::optional<std::string> event_id;
  std::optional<std::string> event_type_id;
  std::optional<std::int64_t> number_of_winners;
  std::optional<std::string> betting_type;
  std::optional<std::string> market_type;
  std::optional<std::string> market_time;
  std::optional<std::string> suspend_time;
  std::optional<bool> bsp_reconciled;
  std::optional<bool> complete;
  std::optional<bool> in_play;
  std::optional<bool> cross_matching;
  std::optional<bool> runners_voidable;
  std::optional<std::int64_t> number_of_active_runners;
  std::optional<std::int64_t> bet_delay;
  std::optional<std::string> status;
  std::optional<std::vector<std::string>> regulators;
  std::optional<bool> discount_allowed;
  std::optional<std::string> timezone;
  std::optional<std::string> open_date;
  std::optional<std::int64_t> version;
  std::optional<std::string> name;
  std::optional<std::string> event_name;
  std::optional<std::vector<RunnerDefinition>> runners;
  bool operator==(const MarketDefinitionMsg&) const = default;
};

/// Delta update for one selection. Absent fields mean "unchanged".
struct RunnerChangeMsg {
  std::int64_t id = 0;
  std::optional<double> ltp;
  std::optional<double> tv;
  std::optional<PriceLadder> trd;
  std::optional<PriceLadder> atb;
  std::optional<PriceLadder> atl;
  std::optional<PriceLadder> spb;
  std::optional<PriceLadder> spl;
  std::optional<double> spn;
  std::optional<double> spf;
  std::optional<double> hc;
  bool operator==(const RunnerChangeMsg&) const = default;
};

struct MarketChange {
  std::string id;
  std::optional<MarketDefinitionMsg> market_definition;
  std::optional<std::vector<RunnerChangeMsg>> rc;
  std::optional<double> tv;
  bool operator==(const MarketChange&) const = default;
};

struct MessageEnvelope {
  std::string op;
  std::optional<std::string> clk;
  std::int64_t pt = 0;  // publish time, ms since Unix epoch
  std::vector<MarketChange> mc;
  bool operator==(const MessageEnvelope&) const = default;
};

}  // namespace bfstats::ingest
