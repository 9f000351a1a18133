#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bfstats/ingest/archive.hpp"
#include "bfstats/market/datasets.hpp"
#include "bfstats/market/state.hpp"
#include "bfstats/synth/stream.hpp"
#include "bfstats/synth/ticks.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bfstats;
using namespace bfstats::synth;
using doctest::Approx;

namespace {

double mean(const Eigen::VectorXd& x) { return x.mean(); }

double variance(const Eigen::VectorXd& x) {
  const double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

double lag1(const Eigen::VectorXd& x) {
  const Eigen::VectorXd d = x.array() - x.mean();
  const Eigen::Index n = d.size();
  return d.head(n - 1).dot(d.tail(n - 1)) / d.squaredNorm();
}

std::vector<ingest::MessageEnvelope> parse_file(const SyntheticMarketFile& f, Diagnostics* diag = nullptr) {
  const auto src = ingest::MarketSource::from_bytes(f.event_id + "/" + f.market_id + ".bz2", f.event_id, f.market_id,
                                                    ingest::compress_bz2(f.text));
  auto file = ingest::read_market_file(src);
  if (diag) diag->merge(file.diagnostics);
  return std::move(file.messages);
}

}  // namespace

TEST_SUITE("generate_series") {
  TEST_CASE("gaussian moments at n = 1e6") {
    const auto x = testing::draw(Family::gaussian, 1000000, 42);
    CHECK(std::abs(mean(x)) < 0.005);
    CHECK(std::abs(std::sqrt(variance(x)) - 1.0) < 0.005);
  }

  TEST_CASE("ar1 with phi = 0 is white noise at lag 1") {
    const std::size_t n = 20000;
    const auto x = testing::draw(Family::ar1, n, 9, {{"phi", 0.0}});
    CHECK(std::abs(lag1(x)) < 1.96 / std::sqrt(static_cast<double>(n)));
    const auto y = testing::draw(Family::ar1, n, 9, {{"phi", 0.5}});
    CHECK(lag1(y) == Approx(0.5).epsilon(0.05));
  }

  TEST_CASE("pareto tail fraction matches the closed form") {
    const auto x = testing::draw(Family::pareto, 100000, 5, {{"alpha", 3.0}, {"xm", 1.0}});
    CHECK(x.minCoeff() >= 1.0);
    std::vector<double> v(x.data(), x.data() + x.size());
    std::sort(v.begin(), v.end());
    // Theoretical 99th percentile, then compare the empirical exceedance.
    const double q = std::pow(0.01, -1.0 / 3.0);
    const double tail = static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), q)) / v.size();
    const double want = std::pow(1.0 / q, 3.0);
    CHECK(std::abs(tail - want) / want < 0.2);
  }

  TEST_CASE("closed-form variances of the other families") {
    const std::size_t n = 400000;
    CHECK(variance(testing::draw(Family::laplace, n, 1, {{"scale", 1.5}})) == Approx(2 * 1.5 * 1.5).epsilon(0.02));
    CHECK(variance(testing::draw(Family::student_t, n, 2, {{"nu", 5.0}})) == Approx(5.0 / 3.0).epsilon(0.03));
    const double beta = 1.5, scale = 0.8;
    const double gg_var = scale * scale * std::tgamma(3 / beta) / std::tgamma(1 / beta);
    CHECK(variance(testing::draw(Family::generalized_gaussian, n, 3, {{"beta", beta}, {"scale", scale}})) ==
          Approx(gg_var).epsilon(0.02));
    const double omega = 1e-5, a1 = 0.1, b1 = 0.85;
    CHECK(variance(testing::draw(Family::garch11, n, 4)) == Approx(omega / (1 - a1 - b1)).epsilon(0.08));
  }

  TEST_CASE("random walk increments carry the drift") {
    const auto x = testing::draw(Family::random_walk, 100000, 8, {{"drift", 0.1}, {"sigma", 0.5}});
    const Eigen::VectorXd d = x.tail(x.size() - 1) - x.head(x.size() - 1);
    CHECK(mean(d) == Approx(0.1).epsilon(0.05));
    CHECK(std::sqrt(variance(d)) == Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("determinism and tagging") {
    GeneratorSpec spec{Family::garch11, {}, 1000, 77};
    const auto a = generate_series(spec);
    const auto b = generate_series(spec);
    CHECK(a.values == b.values);
    CHECK(a.kind == returns::ReturnKind::raw);
    CHECK(a.t.size() == 1000);
    CHECK(a.t.back() == 999);
    spec.seed = 78;
    CHECK(generate_series(spec).values != a.values);
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(generate_series({Family::garch11, {{"a1", 0.5}, {"b1", 0.5}}, 10, 0}), DomainError);
    CHECK_THROWS_AS(generate_series({Family::gaussian, {{"sigma", -1.0}}, 10, 0}), DomainError);
    CHECK_THROWS_AS(generate_series({Family::pareto, {{"alpha", 0.0}}, 10, 0}), DomainError);
    CHECK_THROWS_AS(generate_series({Family::generalized_gaussian, {{"beta", 0.0}}, 10, 0}), DomainError);
    CHECK_THROWS_AS(generate_series({Family::student_t, {{"nu", -2.0}}, 10, 0}), DomainError);
    CHECK_THROWS_AS(family_from_string("cauchy"), DomainError);
    for (auto f : {Family::gaussian, Family::laplace, Family::generalized_gaussian, Family::pareto, Family::student_t,
                   Family::ar1, Family::random_walk, Family::garch11})
      CHECK(family_from_string(to_string(f)) == f);
  }
}

TEST_SUITE("tick grid") {
  TEST_CASE("bounds and ordering") {
    CHECK(tick_price(0) == 1.01);
    CHECK(tick_price(tick_count() - 1) == 1000.0);
    for (int i = 1; i < tick_count(); ++i) CHECK(tick_price(i) > tick_price(i - 1));
    CHECK(tick_index(2.0) == tick_index(2.0 + 1e-9));
    CHECK(tick_price(tick_index(3.47)) <= 3.47);
    CHECK(tick_index(0.5) == 0);
    CHECK(tick_index(5000) == tick_count() - 1);
  }
}

TEST_SUITE("generate_stream") {
  TEST_CASE("one market, three runners, one hundred messages") {
    SyntheticStreamSpec spec;
    spec.markets = 1;
    spec.runners_min = spec.runners_max = 3;
    spec.messages = 100;
    spec.seed = 1;
    const auto files = generate_stream(spec);
    REQUIRE(files.size() == 1);
    CHECK(files[0].runners == 3);
    Diagnostics diag;
    const auto msgs = parse_file(files[0], &diag);
    CHECK(msgs.size() == 100);
    const auto recs = market::build_runner_change_dataset(msgs, diag);
    const auto defs = market::build_definition_datasets(msgs);
    const auto winners = market::extract_winners(market::collect_definitions(msgs), diag);
    CHECK(diag.empty());
    CHECK(defs.condensed.size() == 1);
    REQUIRE(winners.size() == 1);
    CHECK(winners[0].winner == files[0].winner);
    CHECK(recs.size() >= 97);
    CHECK(recs.size() == files[0].runner_change_entries);
  }

  TEST_CASE("byte-identical across runs") {
    SyntheticStreamSpec spec;
    spec.markets = 5;
    spec.seed = 123;
    CHECK(join_stream(generate_stream(spec)) == join_stream(generate_stream(spec)));
    auto other = spec;
    other.seed = 124;
    CHECK(join_stream(generate_stream(spec)) != join_stream(generate_stream(other)));
  }

  TEST_CASE("seventy-three markets parse cleanly") {
    SyntheticStreamSpec spec;
    spec.markets = 73;
    spec.seed = 7;
    const auto files = generate_stream(spec);
    REQUIRE(files.size() == 73);
    Diagnostics diag;
    std::vector<ingest::MessageEnvelope> all;
    std::set<std::string> ids;
    for (const auto& f : files) {
      auto msgs = parse_file(f, &diag);
      CHECK(f.runners >= 3);
      CHECK(f.runners <= 21);
      std::int64_t prev = 0;
      for (const auto& m : msgs) {
        CHECK(m.pt >= prev);
        prev = m.pt;
      }
      ids.insert(f.market_id);
      all.insert(all.end(), msgs.begin(), msgs.end());
    }
    CHECK(ids.size() == 73);
    const auto winners = market::extract_winners(market::collect_definitions(all), diag);
    CHECK(winners.size() == 73);
    CHECK(diag.empty());
  }

  TEST_CASE("prices stay on the grid bounds") {
    SyntheticStreamSpec spec;
    spec.markets = 10;
    spec.messages = 2000;
    spec.seed = 99;
    for (const auto& f : generate_stream(spec)) {
      for (const auto& m : parse_file(f)) {
        for (const auto& mc : m.mc) {
          if (!mc.rc) continue;
          for (const auto& rc : *mc.rc) {
            if (rc.ltp) {
              CHECK(*rc.ltp >= ingest::kMinOdds);
              CHECK(*rc.ltp <= ingest::kMaxOdds);
            }
            for (const auto* ladder : {&rc.atb, &rc.atl, &rc.trd})
              if (*ladder)
                for (const auto& l : **ladder) {
                  CHECK(l.price >= ingest::kMinOdds);
                  CHECK(l.price <= ingest::kMaxOdds);
                }
          }
        }
      }
    }
  }

  TEST_CASE("replayed state ends closed with one winner") {
    SyntheticStreamSpec spec;
    spec.markets = 4;
    spec.seed = 17;
    for (const auto& f : generate_stream(spec)) {
      market::MarketState s;
      for (const auto& m : parse_file(f)) s = market::apply_delta(s, m);
      CHECK(s.status == "CLOSED");
      CHECK(s.in_play);
      CHECK(s.event_id == f.event_id);
      int winners = 0;
      for (const auto& [id, r] : s.runners) winners += r.status == "WINNER";
      CHECK(winners == 1);
      CHECK(s.runners.at(f.winner).status == "WINNER");
    }
  }

  TEST_CASE("tree layout and event grouping") {
    SyntheticStreamSpec spec;
    spec.markets = 10;
    spec.markets_per_event = 4;
    spec.messages = 50;
    const auto files = generate_stream(spec);
    std::set<std::string> events;
    for (const auto& f : files) events.insert(f.event_id);
    CHECK(events.size() == 3);
    testing::TempDir dir("tree");
    write_stream_tree(files, dir.path);
    const auto sources = ingest::open_archive(dir.path);
    REQUIRE(sources.size() == 10);
    for (std::size_t i = 0; i < files.size(); ++i) {
      CHECK(sources[i].market_id() == files[i].market_id);
      CHECK(sources[i].event_id() == files[i].event_id);
    }
  }

  TEST_CASE("invalid specs") {
    SyntheticStreamSpec spec;
    spec.runners_min = 2;
    CHECK_THROWS_AS(generate_stream(spec), DomainError);
    spec = {};
    spec.runners_max = 22;
    CHECK_THROWS_AS(generate_stream(spec), DomainError);
    spec = {};
    spec.runners_min = 10;
    spec.runners_max = 5;
    CHECK_THROWS_AS(generate_stream(spec), DomainError);
    spec = {};
    spec.messages = 5;
    CHECK_THROWS_AS(generate_stream(spec), DomainError);
  }
}
