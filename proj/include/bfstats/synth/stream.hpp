#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bfstats::synth {

/// Shape of a synthetic exchange corpus. Counts are per market.
struct SyntheticStreamSpec {
  int markets = 1;
  int runners_min = 3;  // runners per market drawn uniformly from [min, max]
  int runners_max = 21;
  int messages = 400;
  double mean_gap_s = 50.0;  // lognormal inter-message time
  double sd_gap_s = 450.0;
  int markets_per_event = 8;
  std::int64_t start_pt = 1609459200000;  // 2021-01-01 00:00:00 GMT
  std::uint64_t seed = 0;
};

struct SyntheticMarketFile {
  std::string event_id;
  std::string market_id;
  std::string text;  // newline-delimited JSON
  std::int64_t winner = 0;
  int runners = 0;
  int runner_change_entries = 0;
};

/// One market file per market: an opening definition, delta runner changes,
/// an optional mid-market removal, a suspend and in-play turn, and a closing
/// definition with exactly one WINNER. Deterministic in `spec.seed`.
/// Throws DomainError for an invalid spec.
std::vector<SyntheticMarketFile> generate_stream(const SyntheticStreamSpec& spec);

/// All market files concatenated in market order.
std::string join_stream(const std::vector<SyntheticMarketFile>& files);

/// Writes `<dir>/<eventId>/<marketId>.bz2` for each file.
void write_stream_tree(const std::vector<SyntheticMarketFile>& files, const std::filesystem::path& dir);

}  // namespace bfstats::synth
