#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>

#include "bfstats/ingest/parse.hpp"
#include "bfstats/synth/series.hpp"

namespace testing {

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("bfstats_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline Eigen::VectorXd draw(bfstats::synth::Family family, std::size_t n, std::uint64_t seed,
                            std::map<std::string, double> params = {}) {
  bfstats::synth::GeneratorSpec spec;
  spec.family = family;
  spec.n = n;
  spec.seed = seed;
  spec.params = std::move(params);
  return bfstats::synth::generate_series(spec).values;
}

/// Parsed messages of a JSON-lines fixture under tests/fixtures.
inline std::vector<bfstats::ingest::MessageEnvelope> fixture_messages(const std::string& name) {
  std::ifstream in(std::filesystem::path(BFSTATS_FIXTURE_DIR) / name);
  std::vector<bfstats::ingest::MessageEnvelope> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) out.push_back(bfstats::ingest::parse_message(line, ++n));
  return out;
}

/// Parse a block of JSON lines written inline in a test.
inline std::vector<bfstats::ingest::MessageEnvelope> parse_lines(const std::string& text) {
  std::vector<bfstats::ingest::MessageEnvelope> out;
  std::size_t start = 0, n = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) out.push_back(bfstats::ingest::parse_message(text.substr(start, end - start), ++n));
    start = end + 1;
  }
  return out;
}

}  // namespace testing
