#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "bfstats/csv.hpp"
#include "bfstats/market/datasets.hpp"

namespace bfstats::market {

const std::vector<std::string>& runner_change_columns();
const std::vector<std::string>& definition_columns(bool full);
const std::vector<std::string>& winner_columns();

csv::Table to_table(std::span<const RunnerChangeRecord> records);
csv::Table to_table(std::span<const MarketDefinitionRecord> records, bool full);
csv::Table to_table(std::span<const WinnerRecord> records);

std::vector<RunnerChangeRecord> runner_changes_from_table(const csv::Table& table);
std::vector<MarketDefinitionRecord> definitions_from_table(const csv::Table& table, bool full);
std::vector<WinnerRecord> winners_from_table(const csv::Table& table);

void export_csv(std::span<const RunnerChangeRecord> records, const std::filesystem::path& path);
void export_csv(std::span<const MarketDefinitionRecord> records, bool full, const std::filesystem::path& path);
void export_csv(std::span<const WinnerRecord> records, const std::filesystem::path& path);

/// Ladder cell text: a JSON array of [price, size] pairs.
std::string ladder_cell(const std::optional<PriceLadder>& ladder);
std::optional<PriceLadder> parse_ladder_cell(const std::string& cell);

}  // namespace bfstats::market
