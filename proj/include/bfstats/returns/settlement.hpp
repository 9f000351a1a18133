#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfstats/csv.hpp"
#include "bfstats/errors.hpp"
#include "bfstats/market/datasets.hpp"

namespace bfstats::returns {

enum class Side { back, lay };

const char* to_string(Side side);

/// Net settlement of one matched stake.
struct SettlementReturnRecord {
  std::int64_t t = 0;
  std::string event_id;
  std::string market_id;
  std::int64_t selection_id = 0;
  Side side = Side::back;
  double stake = 0.0;  // backer's stake
  double odds = 0.0;   // decimal
  double net_return = 0.0;

  bool positive() const { return net_return > 0; }
  bool operator==(const SettlementReturnRecord&) const = default;
};

/// Back: win stake (odds - 1)(1 - c), lose -stake.
double back_net_return(double stake, double odds, bool runner_won, double commission);
/// Lay against a backer's stake: runner loses -> stake (1 - c), runner wins -> -stake (odds - 1).
double lay_net_return(double stake, double odds, bool runner_won, double commission);

/// Commission rate per market: `override_rate` if set, else marketBaseRate/100
/// from that market's definitions, else `default_rate`.
struct CommissionPolicy {
  double default_rate = 0.05;
  std::optional<double> override_rate;
  std::map<std::string, double> market_rates;  // fraction, not percent

  double rate_for(const std::string& market_id) const;
};

/// Collects marketBaseRate (percent) from the latest definition carrying it.
CommissionPolicy commission_from_definitions(const market::DefinitionHistory& history, double default_rate = 0.05,
                                             std::optional<double> override_rate = std::nullopt);

struct SettlementSplit {
  std::vector<SettlementReturnRecord> positive;
  std::vector<SettlementReturnRecord> negative;
  std::size_t zero = 0;  // records with net_return == 0, in neither list
};

/// For every record where a selection's traded volume rises, stake = the rise
/// and odds = the latest ltp; emits a back and a lay record settled against
/// the market's winner. Falling volume and signals without a known price are
/// skipped with a warning; markets without a winner are skipped with one.
SettlementSplit settlement_returns(std::span<const market::RunnerChangeRecord> records,
                                   std::span<const market::WinnerRecord> winners, const CommissionPolicy& commission,
                                   Diagnostics& diag);

/// Merge record lists into one list ordered by timestamp (stable).
std::vector<SettlementReturnRecord> concat_returns(std::span<const std::vector<SettlementReturnRecord>> parts);

const std::vector<std::string>& settlement_columns();
csv::Table to_table(std::span<const SettlementReturnRecord> records);
/// Throws SchemaError when the header does not match settlement_columns().
std::vector<SettlementReturnRecord> settlement_from_table(const csv::Table& table);

}  // namespace bfstats::returns
