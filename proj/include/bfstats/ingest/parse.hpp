#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bfstats/ingest/message.hpp"

namespace bfstats::ingest {

/// Counters accumulated while decoding lines of one file.
struct ParseCounters {
  std::size_t lines = 0;
  std::size_t unknown_fields = 0;
};

/// Decode one newline-delimited JSON stream message.
///
/// Absent wire fields stay disengaged in the result. Unrecognized keys are
/// skipped and tallied in `counters` when given. `line_no` is only used to
/// label errors.
///
/// Throws ParseError on malformed JSON and SchemaError when `pt` is missing
/// or not an integer, or a known field has the wrong JSON type.
MessageEnvelope parse_message(std::string_view line, std::size_t line_no = 0,
                              ParseCounters* counters = nullptr);

/// Canonical single-line JSON for an envelope; disengaged fields are omitted.
std::string serialize_message(const MessageEnvelope& msg);

/// GMT "YYYY-MM-DD HH:MM:SS" for a publish time in ms; sub-second part is dropped.
std::string format_time(std::int64_t pt_ms);

}  // namespace bfstats::ingest
