#include "bfstats/market/export.hpp"

#include "json.hpp"

#include "bfstats/errors.hpp"

namespace bfstats::market {

using csv::cell;

const std::vector<std::string>& runner_change_columns() {
  static const std::vector<std::string> cols{"atb", "id",  "t",  "inPlay", "spn", "spf",     "atl",
                                             "spl", "trd", "ltp", "tv",    "spb", "eventId", "marketId"};
  return cols;
}

const std::vector<std::string>& definition_columns(bool full) {
  static const std::vector<std::string> condensed{"id",           "turnInPlayEnabled", "marketBaseRate",
                                                  "eventId",      "marketTime",        "suspendTime",
                                                  "complete",     "numberOfActiveRunners"};
  static const std::vector<std::string> with_in_play = [] {
    auto c = condensed;
    c.push_back("inPlay");
    return c;
  }();
  return full ? with_in_play : condensed;
}

const std::vector<std::string>& winner_columns() {
  static const std::vector<std::string> cols{"id", "winner", "eventId", "numberOfRunners"};
  return cols;
}

std::string ladder_cell(const std::optional<PriceLadder>& ladder) {
  if (!ladder) return {};
  std::string out = "[";
  for (std::size_t i = 0; i < ladder->size(); ++i) {
    if (i) out += ',';
    out += '[' + csv::format_double((*ladder)[i].price) + ',' + csv::format_double((*ladder)[i].size) + ']';
  }
  return out + "]";
}

std::optional<PriceLadder> parse_ladder_cell(const std::string& text) {
  if (text.empty()) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw SchemaError("ladder cell is not a JSON array: " + text);
  }
  if (!j.is_array()) throw SchemaError("ladder cell is not a JSON array: " + text);
  PriceLadder ladder;
  for (const auto& level : j) {
    if (!level.is_array() || level.size() != 2) throw SchemaError("ladder level must be [price, size]");
    ladder.push_back({level[0].get<double>(), level[1].get<double>()});
  }
  return ladder;
}

csv::Table to_table(std::span<const RunnerChangeRecord> records) {
  csv::Table t{runner_change_columns(), {}};
  t.rows.reserve(records.size());
  for (const auto& r : records)
    t.rows.push_back({ladder_cell(r.atb), std::to_string(r.id), r.t, cell(r.in_play), cell(r.spn), cell(r.spf),
                      ladder_cell(r.atl), ladder_cell(r.spl), ladder_cell(r.trd), cell(r.ltp), cell(r.tv),
                      ladder_cell(r.spb), r.event_id, r.market_id});
  return t;
}

csv::Table to_table(std::span<const MarketDefinitionRecord> records, bool full) {
  csv::Table t{definition_columns(full), {}};
  for (const auto& r : records) {
    std::vector<std::string> row{r.id,
                                 cell(r.turn_in_play_enabled),
                                 cell(r.market_base_rate),
                                 r.event_id,
                                 cell(r.market_time),
                                 cell(r.suspend_time),
                                 cell(r.complete),
                                 cell(r.number_of_active_runners)};
    if (full) row.push_back(cell(r.in_play));
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table to_table(std::span<const WinnerRecord> records) {
  csv::Table t{winner_columns(), {}};
  for (const auto& r : records)
    t.rows.push_back({r.id, std::to_string(r.winner), r.event_id, std::to_string(r.number_of_runners)});
  return t;
}

std::vector<RunnerChangeRecord> runner_changes_from_table(const csv::Table& table) {
  csv::require_header(table, runner_change_columns(), "runner changes");
  std::vector<RunnerChangeRecord> out;
  for (const auto& row : table.rows) {
    RunnerChangeRecord r;
    r.atb = parse_ladder_cell(row[0]);
    r.id = csv::opt_int(row[1]).value_or(0);
    r.t = row[2];
    r.in_play = csv::opt_bool(row[3]).value_or(false);
    r.spn = csv::opt_double(row[4]);
    r.spf = csv::opt_double(row[5]);
    r.atl = parse_ladder_cell(row[6]);
    r.spl = parse_ladder_cell(row[7]);
    r.trd = parse_ladder_cell(row[8]);
    r.ltp = csv::opt_double(row[9]);
    r.tv = csv::opt_double(row[10]);
    r.spb = parse_ladder_cell(row[11]);
    r.event_id = row[12];
    r.market_id = row[13];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MarketDefinitionRecord> definitions_from_table(const csv::Table& table, bool full) {
  csv::require_header(table, definition_columns(full), full ? "market definitions (full)" : "market definitions");
  std::vector<MarketDefinitionRecord> out;
  for (const auto& row : table.rows) {
    MarketDefinitionRecord r;
    r.id = row[0];
    r.turn_in_play_enabled = csv::opt_bool(row[1]);
    r.market_base_rate = csv::opt_double(row[2]);
    r.event_id = row[3];
    r.market_time = csv::opt_string(row[4]);
    r.suspend_time = csv::opt_string(row[5]);
    r.complete = csv::opt_bool(row[6]);
    r.number_of_active_runners = csv::opt_int(row[7]);
    if (full) r.in_play = csv::opt_bool(row[8]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<WinnerRecord> winners_from_table(const csv::Table& table) {
  csv::require_header(table, winner_columns(), "winners");
  std::vector<WinnerRecord> out;
  for (const auto& row : table.rows)
    out.push_back({row[0], csv::opt_int(row[1]).value_or(0), row[2], csv::opt_int(row[3]).value_or(0)});
  return out;
}

void export_csv(std::span<const RunnerChangeRecord> records, const std::filesystem::path& path) {
  csv::write(path, to_table(records));
}
void export_csv(std::span<const MarketDefinitionRecord> records, bool full, const std::filesystem::path& path) {
  csv::write(path, to_table(records, full));
}
void export_csv(std::span<const WinnerRecord> records, const std::filesystem::path& path) {
  csv::write(path, to_table(records));
}

}  // namespace bfstats::market
