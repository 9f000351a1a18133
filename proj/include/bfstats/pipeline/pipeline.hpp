#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfstats/errors.hpp"
#include "bfstats/ingest/archive.hpp"
#include "bfstats/market/datasets.hpp"
#include "bfstats/pipeline/config.hpp"
#include "bfstats/returns/series.hpp"
#include "bfstats/returns/settlement.hpp"
#include "json.hpp"

namespace bfstats::pipeline {

/// Run-level failure: nothing usable to analyze. `code` is a stable token.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// A market (or file) that dropped out of some stage, with the reason.
struct MarketError {
  std::string market_id;
  std::string stage;  // ingest, returns, or an estimator name
  std::string message;
};

struct IngestResult {
  std::vector<ingest::MarketFile> files;  // decoded, in path order
  std::vector<MarketError> failures;      // files that could not be decoded
  std::string input_hash;                 // FNV-1a 64 over input file names and bytes
  std::size_t message_count() const;
};

/// Decode every market file under `config.input`, in parallel. Throws
/// PipelineError("no_markets") when nothing is found or nothing decodes.
IngestResult ingest_all(const RunConfig& config);

struct Datasets {
  std::vector<market::RunnerChangeRecord> runner_changes;  // time sorted, stable
  std::vector<market::MarketDefinitionRecord> definitions_full;
  std::vector<market::MarketDefinitionRecord> definitions;  // condensed
  std::vector<market::WinnerRecord> winners;
  market::DefinitionHistory history;
  std::map<std::string, std::size_t> message_counts;  // per market id
  std::map<std::string, std::string> market_events;   // market id -> event id
};

Datasets build_datasets(const IngestResult& ingest, Diagnostics& diag);

/// runner_changes_<eventId>.csv, market_definitions_full.csv,
/// market_definitions.csv, winners.csv. Returns the written paths.
std::vector<std::filesystem::path> write_datasets(const Datasets& data, const std::filesystem::path& dir);

struct ReturnData {
  std::map<std::string, returns::ReturnSeries> market_log;  // scaled log returns per market
  returns::ReturnSeries pooled;                             // all markets, merged by time
  returns::SettlementSplit settlement;
};

ReturnData compute_returns(const Datasets& data, const RunConfig& config, Diagnostics& diag);

/// returns_positive_<eventId>.csv, returns_negative_<eventId>.csv,
/// returns_all.csv and log_returns.csv.
std::vector<std::filesystem::path> write_returns(const ReturnData& data, const Datasets& datasets,
                                                 const std::filesystem::path& dir);

/// The analysis battery. The result is the report document; keys are sorted
/// and nothing in it depends on wall-clock time or output location.
nlohmann::json analyze(const IngestResult& ingest, const Datasets& data, const ReturnData& returns,
                       const RunConfig& config, const Diagnostics& diag);

/// Markets for the ACF figures: `config.sample_markets` if set, else the
/// three reference ids when all are present, else the three markets with
/// the most messages (ties by id).
std::vector<std::string> sample_markets(const Datasets& data, const RunConfig& config);

struct PipelineResult {
  nlohmann::json report;
  std::vector<std::filesystem::path> files;
  Diagnostics diagnostics;
};

/// ingest -> datasets -> returns -> analyze -> report, writing every output
/// under `config.output`. Progress goes to `log` when given.
PipelineResult run_pipeline(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace bfstats::pipeline
