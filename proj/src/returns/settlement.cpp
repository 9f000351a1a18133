#include "bfstats/returns/settlement.hpp"

#include <algorithm>

namespace bfstats::returns {

const char* to_string(Side side) { return side == Side::back ? "back" : "lay"; }

double back_net_return(double stake, double odds, bool runner_won, double commission) {
  return runner_won ? stake * (odds - 1.0) * (1.0 - commission) : -stake;
}

double lay_net_return(double stake, double odds, bool runner_won, double commission) {
  return runner_won ? -stake * (odds - 1.0) : stake * (1.0 - commission);
}

double CommissionPolicy::rate_for(const std::string& market_id) const {
  if (override_rate) return *override_rate;
  auto it = market_rates.find(market_id);
  return it != market_rates.end() ? it->second : default_rate;
}

CommissionPolicy commission_from_definitions(const market::DefinitionHistory& history, double default_rate,
                                             std::optional<double> override_rate) {
  CommissionPolicy policy;
  policy.default_rate = default_rate;
  policy.override_rate = override_rate;
  for (const auto& [market, defs] : history)
    for (const auto& d : defs)
      if (d.definition.market_base_rate) policy.market_rates[market] = *d.definition.market_base_rate / 100.0;
  return policy;
}

SettlementSplit settlement_returns(std::span<const market::RunnerChangeRecord> records,
                                   std::span<const market::WinnerRecord> winners, const CommissionPolicy& commission,
                                   Diagnostics& diag) {
  std::map<std::string, std::int64_t> winner_of;
  for (const auto& w : winners) winner_of[w.id] = w.winner;

  struct Track {
    double tv = 0.0;
    std::optional<double> ltp;
  };
  std::map<std::pair<std::string, std::int64_t>, Track> tracks;
  std::map<std::string, bool> missing_reported;

  SettlementSplit out;
  for (const auto& r : records) {
    auto& track = tracks[{r.market_id, r.id}];
    if (r.ltp) track.ltp = r.ltp;
    if (!r.tv) continue;
    const double delta = *r.tv - track.tv;
    if (delta < 0) {
      diag.warn("traded_volume_decrease", r.market_id,
                "selection " + std::to_string(r.id) + " tv fell by " + std::to_string(-delta) + "; signal skipped");
      continue;
    }
    track.tv = *r.tv;
    if (delta == 0) continue;

    auto w = winner_of.find(r.market_id);
    if (w == winner_of.end()) {
      if (!missing_reported[r.market_id]) {
        diag.warn("missing_winner", r.market_id, "no winner resolved; market skipped");
        missing_reported[r.market_id] = true;
      }
      continue;
    }
    if (!track.ltp) {
      diag.warn("no_price", r.market_id, "selection " + std::to_string(r.id) + " traded before any ltp");
      continue;
    }

    const bool won = w->second == r.id;
    const double c = commission.rate_for(r.market_id);
    for (Side side : {Side::back, Side::lay}) {
      SettlementReturnRecord rec{r.pt, r.event_id, r.market_id, r.id, side, delta, *track.ltp, 0.0};
      rec.net_return = side == Side::back ? back_net_return(delta, *track.ltp, won, c)
                                          : lay_net_return(delta, *track.ltp, won, c);
      if (rec.net_return > 0)
        out.positive.push_back(std::move(rec));
      else if (rec.net_return < 0)
        out.negative.push_back(std::move(rec));
      else
        ++out.zero;
    }
  }
  return out;
}

std::vector<SettlementReturnRecord> concat_returns(std::span<const std::vector<SettlementReturnRecord>> parts) {
  std::vector<SettlementReturnRecord> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return out;
}

const std::vector<std::string>& settlement_columns() {
  static const std::vector<std::string> cols{"t",    "eventId", "marketId", "selectionId",
                                             "side", "stake",   "odds",     "net_return"};
  return cols;
}

csv::Table to_table(std::span<const SettlementReturnRecord> records) {
  csv::Table t{settlement_columns(), {}};
  t.rows.reserve(records.size());
  for (const auto& r : records)
    t.rows.push_back({std::to_string(r.t), r.event_id, r.market_id, std::to_string(r.selection_id), to_string(r.side),
                      csv::format_double(r.stake), csv::format_double(r.odds), csv::format_double(r.net_return)});
  return t;
}

std::vector<SettlementReturnRecord> settlement_from_table(const csv::Table& table) {
  csv::require_header(table, settlement_columns(), "settlement returns");
  std::vector<SettlementReturnRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    SettlementReturnRecord r;
    r.t = csv::opt_int(row[0]).value_or(0);
    r.event_id = row[1];
    r.market_id = row[2];
    r.selection_id = csv::opt_int(row[3]).value_or(0);
    if (row[4] == "back") r.side = Side::back;
    else if (row[4] == "lay") r.side = Side::lay;
    else throw SchemaError("settlement returns: side must be back or lay");
    r.stake = csv::opt_double(row[5]).value_or(0);
    r.odds = csv::opt_double(row[6]).value_or(0);
    r.net_return = csv::opt_double(row[7]).value_or(0);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bfstats::returns
