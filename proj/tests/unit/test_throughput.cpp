#include <chrono>
#include <iostream>

#include "bfstats/pipeline/pipeline.hpp"
#include "bfstats/synth/stream.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bfstats;

TEST_CASE("decode a corpus-sized stream in under a minute") {
  constexpr std::size_t kSignals = 1056766;
  synth::SyntheticStreamSpec spec;
  spec.messages = 400;
  spec.markets = static_cast<int>((kSignals + spec.messages - 1) / spec.messages);
  spec.seed = 2024;
  testing::TempDir dir("throughput");
  synth::write_stream_tree(synth::generate_stream(spec), dir.path);

  pipeline::RunConfig config;
  config.input = dir.path;
  const auto start = std::chrono::steady_clock::now();
  const auto ingest = pipeline::ingest_all(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << ingest.message_count() << " messages from " << ingest.files.size() << " files decoded in " << seconds
            << " s\n";
  CHECK(ingest.failures.empty());
  CHECK(ingest.message_count() >= kSignals);
  CHECK(seconds < 60.0);
}
