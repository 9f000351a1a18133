#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfstats/errors.hpp"
#include "bfstats/ingest/message.hpp"

namespace bfstats::market {

using ingest::MessageEnvelope;
using ingest::PriceLadder;

/// One runner change row. Ladder and price fields keep the delta values of
/// the source message; absent stays absent.
struct RunnerChangeRecord {
  std::optional<PriceLadder> atb;
  std::int64_t id = 0;
  std::string t;  // GMT "YYYY-MM-DD HH:MM:SS"
  bool in_play = false;
  std::optional<double> spn;
  std::optional<double> spf;
  std::optional<PriceLadder> atl;
  std::optional<PriceLadder> spl;
  std::optional<PriceLadder> trd;
  std::optional<double> ltp;
  std::optional<double> tv;
  std::optional<PriceLadder> spb;
  std::string event_id;
  std::string market_id;

  // Publish time in ms. Sort key only, not one of the exported columns.
  std::int64_t pt = 0;

  /// Equality over the exported columns.
  bool same_columns(const RunnerChangeRecord& o) const;
};

struct MarketDefinitionRecord {
  std::string id;
  std::optional<bool> turn_in_play_enabled;
  std::optional<double> market_base_rate;
  std::string event_id;
  std::optional<std::string> market_time;
  std::optional<std::string> suspend_time;
  std::optional<bool> complete;
  std::optional<std::int64_t> number_of_active_runners;
  std::optional<bool> in_play;  // full-history variant only

  bool operator==(const MarketDefinitionRecord&) const = default;
};

struct WinnerRecord {
  std::string id;  // market
  std::int64_t winner = 0;
  std::string event_id;
  std::int64_t number_of_runners = 0;

  bool operator==(const WinnerRecord&) const = default;
};

/// A definition payload together with its publish time.
struct TimedDefinition {
  std::int64_t pt = 0;
  ingest::MarketDefinitionMsg definition;
};

/// Per market id, every definition message in input order.
using DefinitionHistory = std::map<std::string, std::vector<TimedDefinition>>;

DefinitionHistory collect_definitions(std::span<const MessageEnvelope> messages);

/// One record per runner change, inPlay joined from the latest definition of
/// the same market with pt <= the record's pt, sorted ascending by pt with
/// ties in input order. Runner changes seen before any definition get
/// inPlay = false and a warning. `fallback_event_id` is used when no
/// definition names the event.
std::vector<RunnerChangeRecord> build_runner_change_dataset(std::span<const MessageEnvelope> messages,
                                                            Diagnostics& diag,
                                                            const std::string& fallback_event_id = {});

struct DefinitionDatasets {
  std::vector<MarketDefinitionRecord> full;       // every definition, with inPlay
  std::vector<MarketDefinitionRecord> condensed;  // one per market, no inPlay
};

/// The condensed representative is the last definition before the market
/// status first leaves OPEN, or the last definition if it never does.
DefinitionDatasets build_definition_datasets(std::span<const MessageEnvelope> messages,
                                             const std::string& fallback_event_id = {});

/// A winner row for each market whose final definition has exactly one
/// WINNER. numberOfRunners counts every runner ever ACTIVE while the market
/// was OPEN. Other markets are skipped with a warning.
std::vector<WinnerRecord> extract_winners(const DefinitionHistory& history, Diagnostics& diag,
                                          const std::string& fallback_event_id = {});

}  // namespace bfstats::market
