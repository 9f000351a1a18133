#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bfstats/errors.hpp"
#include "bfstats/ingest/message.hpp"
#include "bfstats/ingest/parse.hpp"

namespace bfstats::ingest {

/// Pulls decompressed lines out of one market file.
class LineStream {
 public:
  LineStream(LineStream&&) noexcept;
  LineStream& operator=(LineStream&&) noexcept;
  ~LineStream();

  /// Next line without its terminator. Returns false at end of stream.
  /// Throws DecodeError if the compressed payload is corrupt or truncated.
  bool next(std::string& line);
  std::size_t line_number() const noexcept { return line_no_; }
  const std::string& name() const noexcept { return name_; }

 private:
  friend class MarketSource;
  struct Impl;
  LineStream(std::string name, std::unique_ptr<Impl> impl);

  std::string name_;
  std::unique_ptr<Impl> impl_;
  std::size_t line_no_ = 0;
};

/// One market file discovered inside an archive, directory or bare path.
/// Identity comes from the layout: `<eventId>/<marketId>.bz2`.
class MarketSource {
 public:
  static MarketSource from_file(const std::filesystem::path& path);
  static MarketSource from_bytes(std::string name, std::string event_id, std::string market_id,
                                 std::string compressed);

  const std::string& name() const noexcept { return name_; }
  const std::string& event_id() const noexcept { return event_id_; }
  const std::string& market_id() const noexcept { return market_id_; }

  LineStream lines() const;

 private:
  std::string name_;
  std::string event_id_;
  std::string market_id_;
  std::filesystem::path path_;
  std::shared_ptr<const std::string> bytes_;
};

/// Enumerate market files under `path`: a .tar.bz2 (or .tar) container, a
/// directory tree of .bz2 files, or a single .bz2 file. Order is by path.
/// Throws std::runtime_error for a missing path and DecodeError for a
/// corrupt container. An empty archive yields an empty list.
std::vector<MarketSource> open_archive(const std::filesystem::path& path);

/// Fully decoded market file plus its data-quality findings.
struct MarketFile {
  std::string name;
  std::string event_id;
  std::string market_id;
  std::vector<MessageEnvelope> messages;
  ParseCounters counters;
  Diagnostics diagnostics;
};

/// Decode every line of a market file. Publish-time regressions, ladder
/// values outside the odds range and market id / filename mismatches are
/// reported as warnings; the messages are still emitted in file order.
MarketFile read_market_file(const MarketSource& source);

/// bzip2 helpers, used by the synthetic writer and fixtures.
std::string compress_bz2(const std::string& text);
std::string decompress_bz2(const std::string& compressed, const std::string& name = "<memory>");

}  // namespace bfstats::ingest
