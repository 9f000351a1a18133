#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "bfstats/ingest/message.hpp"

namespace bfstats::market {

using ingest::PriceLadder;

struct RunnerState {
  std::int64_t id = 0;
  std::optional<double> ltp;
  std::optional<double> tv;  // cumulative traded volume
  PriceLadder atb;           // best first, descending price
  PriceLadder atl;           // best first, ascending price
  PriceLadder trd;           // ascending price
  PriceLadder spb;
  PriceLadder spl;
  std::optional<double> spn;
  std::optional<double> spf;
  std::optional<double> hc;
  std::string status;
};

/// Delta-accumulated view of one market.
struct MarketState {
  std::string market_id;
  std::string event_id;
  bool in_play = false;
  bool has_definition = false;
  std::string status;
  std::optional<double> market_base_rate;  // percent
  std::int64_t number_of_active_runners = 0;
  std::map<std::int64_t, RunnerState> runners;
  std::int64_t last_pt = 0;
};

/// Upsert ladder levels by price; a size of 0 removes the level. `descending`
/// selects the sort order of the result.
void apply_ladder_delta(PriceLadder& ladder, const PriceLadder& delta, bool descending);

/// Fold one market change into the state. Absent fields leave the state
/// untouched; definitions overwrite definition-scoped fields and runner
/// statuses. Throws ContractViolation when `change` is for another market.
MarketState apply_delta(MarketState state, std::int64_t pt, const ingest::MarketChange& change);

/// Envelope form: applies every market change, all of which must target the
/// state's market (a fresh state adopts the first id it sees).
MarketState apply_delta(MarketState state, const ingest::MessageEnvelope& msg);

}  // namespace bfstats::market
