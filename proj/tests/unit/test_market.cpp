#include "bfstats/market/datasets.hpp"
#include "bfstats/market/export.hpp"
#include "bfstats/market/state.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bfstats;
using namespace bfstats::market;
using ingest::MarketChange;
using ingest::RunnerChangeMsg;

namespace {

MarketChange rc_change(const std::string& market, RunnerChangeMsg rc) {
  MarketChange mc;
  mc.id = market;
  mc.rc = std::vector<RunnerChangeMsg>{std::move(rc)};
  return mc;
}

const std::string kFixture = "market_1.122946937.jsonl";

}  // namespace

TEST_SUITE("apply_delta") {
  TEST_CASE("absent fields leave state untouched") {
    MarketState s;
    RunnerChangeMsg first;
    first.id = 7;
    first.ltp = 3.5;
    s = apply_delta(s, 1, rc_change("1.1", first));
    RunnerChangeMsg second;
    second.id = 7;
    second.tv = 200.0;
    s = apply_delta(s, 2, rc_change("1.1", second));
    CHECK(s.runners.at(7).ltp == 3.5);
    CHECK(s.runners.at(7).tv == 200.0);
    CHECK(s.last_pt == 2);
  }

  TEST_CASE("size zero removes a ladder level") {
    MarketState s;
    RunnerChangeMsg a;
    a.id = 1;
    a.atb = ingest::PriceLadder{{3.5, 10.0}};
    s = apply_delta(s, 1, rc_change("1.1", a));
    REQUIRE(s.runners.at(1).atb.size() == 1);
    RunnerChangeMsg b;
    b.id = 1;
    b.atb = ingest::PriceLadder{{3.5, 0.0}};
    s = apply_delta(s, 2, rc_change("1.1", b));
    CHECK(s.runners.at(1).atb.empty());
  }

  TEST_CASE("ladder upsert keeps sort order") {
    ingest::PriceLadder back{{3.5, 10.0}, {3.4, 5.0}};
    apply_ladder_delta(back, {{3.45, 2.0}, {3.5, 12.0}, {3.3, 0.0}}, true);
    CHECK(back == ingest::PriceLadder{{3.5, 12.0}, {3.45, 2.0}, {3.4, 5.0}});
    ingest::PriceLadder lay{{3.6, 1.0}};
    apply_ladder_delta(lay, {{3.55, 4.0}, {3.7, 3.0}}, false);
    CHECK(lay == ingest::PriceLadder{{3.55, 4.0}, {3.6, 1.0}, {3.7, 3.0}});
  }

  TEST_CASE("definition then runner change") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.5","marketDefinition":{"inPlay":true,"status":"OPEN"}}]}
{"op":"mcm","pt":2,"mc":[{"id":"1.5","rc":[{"id":9,"ltp":2.0}]}]})");
    MarketState s;
    for (const auto& m : msgs) s = apply_delta(s, m);
    CHECK(s.in_play);
    CHECK(s.runners.at(9).ltp == 2.0);
    Diagnostics diag;
    const auto recs = build_runner_change_dataset(msgs, diag);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].in_play);
    CHECK(diag.empty());
  }

  TEST_CASE("change for another market violates the contract") {
    MarketState s;
    s = apply_delta(s, 1, rc_change("1.1", RunnerChangeMsg{.id = 1}));
    CHECK_THROWS_AS(apply_delta(s, 2, rc_change("1.2", RunnerChangeMsg{.id = 1})), ContractViolation);
  }

  TEST_CASE("fixture replay") {
    MarketState s;
    for (const auto& m : testing::fixture_messages(kFixture)) s = apply_delta(s, m);
    CHECK(s.market_id == "1.122946937");
    CHECK(s.event_id == "30109871");
    CHECK(s.status == "CLOSED");
    CHECK(s.in_play);
    CHECK(s.market_base_rate == 5.0);
    CHECK(s.runners.at(102).status == "WINNER");
    CHECK(s.runners.at(104).status == "REMOVED");
    CHECK(s.runners.at(101).ltp == 3.4);
    CHECK(s.runners.at(101).tv == 45.0);
    CHECK(s.runners.at(101).atb == ingest::PriceLadder{{3.4, 7.5}});
    CHECK(s.runners.at(102).tv == 80.0);
    CHECK(s.number_of_active_runners == 0);
    CHECK(s.last_pt == 1609460100000);
  }
}

TEST_SUITE("runner change dataset") {
  TEST_CASE("inPlay join follows the latest definition") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":10,"mc":[{"id":"1.1","marketDefinition":{"inPlay":false,"status":"OPEN","eventId":"5"}}]}
{"op":"mcm","pt":20,"mc":[{"id":"1.1","rc":[{"id":1,"ltp":2.0}]}]}
{"op":"mcm","pt":30,"mc":[{"id":"1.1","rc":[{"id":1,"ltp":2.1}]}]}
{"op":"mcm","pt":40,"mc":[{"id":"1.1","marketDefinition":{"inPlay":true,"status":"OPEN"}}]}
{"op":"mcm","pt":50,"mc":[{"id":"1.1","rc":[{"id":1,"ltp":2.2}]}]})");
    Diagnostics diag;
    const auto recs = build_runner_change_dataset(msgs, diag);
    REQUIRE(recs.size() == 3);
    CHECK_FALSE(recs[0].in_play);
    CHECK_FALSE(recs[1].in_play);
    CHECK(recs[2].in_play);
    CHECK(recs[0].event_id == "5");
    CHECK(diag.empty());
  }

  TEST_CASE("empty stream") {
    Diagnostics diag;
    CHECK(build_runner_change_dataset({}, diag).empty());
    const auto defs = build_definition_datasets({});
    CHECK(defs.full.empty());
    CHECK(defs.condensed.empty());
  }

  TEST_CASE("out-of-order input is sorted, ties keep input order") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":0,"mc":[{"id":"1.1","marketDefinition":{"inPlay":false}}]}
{"op":"mcm","pt":3000,"mc":[{"id":"1.1","rc":[{"id":1,"ltp":2.0}]}]}
{"op":"mcm","pt":1000,"mc":[{"id":"1.1","rc":[{"id":2,"ltp":3.0},{"id":3,"ltp":4.0}]}]}
{"op":"mcm","pt":1000,"mc":[{"id":"1.1","rc":[{"id":4,"ltp":5.0}]}]})");
    Diagnostics diag;
    const auto recs = build_runner_change_dataset(msgs, diag);
    REQUIRE(recs.size() == 4);
    CHECK(recs[0].id == 2);
    CHECK(recs[1].id == 3);
    CHECK(recs[2].id == 4);
    CHECK(recs[3].id == 1);
    for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i - 1].t <= recs[i].t);
    CHECK(recs[0].t == "1970-01-01 00:00:01");
  }

  TEST_CASE("runner change before any definition") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.1","rc":[{"id":1,"ltp":2.0}]}]}
{"op":"mcm","pt":2,"mc":[{"id":"1.1","marketDefinition":{"inPlay":true}}]}
{"op":"mcm","pt":3,"mc":[{"id":"1.1","rc":[{"id":1,"ltp":2.1}]}]})");
    Diagnostics diag;
    const auto recs = build_runner_change_dataset(msgs, diag, "77");
    REQUIRE(recs.size() == 2);
    CHECK_FALSE(recs[0].in_play);
    CHECK(recs[1].in_play);
    CHECK(recs[0].event_id == "77");
    CHECK(diag.count("rc_before_definition") == 1);
  }

  TEST_CASE("fixture dataset") {
    const auto msgs = testing::fixture_messages(kFixture);
    Diagnostics diag;
    const auto recs = build_runner_change_dataset(msgs, diag);
    CHECK(diag.empty());
    REQUIRE(recs.size() == 6);
    std::vector<bool> in_play;
    for (const auto& r : recs) in_play.push_back(r.in_play);
    CHECK(in_play == std::vector<bool>{false, false, false, false, false, true});
    CHECK(recs[0].id == 101);
    CHECK(recs[0].t == "2021-01-01 00:00:01");
    CHECK(recs[2].tv == 35.0);
    CHECK_FALSE(recs[2].ltp);
    CHECK(recs[5].id == 102);
    CHECK(recs[5].market_id == "1.122946937");
    CHECK(recs[5].event_id == "30109871");
  }
}

TEST_SUITE("definition datasets") {
  TEST_CASE("fixture: five definitions, one representative") {
    const auto defs = build_definition_datasets(testing::fixture_messages(kFixture));
    REQUIRE(defs.full.size() == 5);
    REQUIRE(defs.condensed.size() == 1);
    std::vector<bool> in_play;
    for (const auto& r : defs.full) in_play.push_back(r.in_play.value());
    CHECK(in_play == std::vector<bool>{false, false, false, true, true});
    // Representative: the removal update, last definition before SUSPENDED.
    const auto& rep = defs.condensed[0];
    CHECK(rep.id == "1.122946937");
    CHECK(rep.number_of_active_runners == 3);
    CHECK_FALSE(rep.in_play);
    MarketDefinitionRecord expected = defs.full[1];
    expected.in_play.reset();
    CHECK(rep == expected);
  }

  TEST_CASE("market that never leaves OPEN uses its last definition") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","numberOfActiveRunners":5}}]}
{"op":"mcm","pt":2,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","numberOfActiveRunners":4}}]})");
    const auto defs = build_definition_datasets(msgs, "9");
    REQUIRE(defs.condensed.size() == 1);
    CHECK(defs.condensed[0].number_of_active_runners == 4);
    CHECK(defs.condensed[0].event_id == "9");
  }

  TEST_CASE("two interleaved markets") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.2","marketDefinition":{"status":"OPEN","marketBaseRate":5}}]}
{"op":"mcm","pt":2,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","marketBaseRate":2}}]}
{"op":"mcm","pt":3,"mc":[{"id":"1.2","marketDefinition":{"status":"SUSPENDED"}}]}
{"op":"mcm","pt":4,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED"}}]})");
    const auto defs = build_definition_datasets(msgs);
    CHECK(defs.full.size() == 4);
    REQUIRE(defs.condensed.size() == 2);
    CHECK(defs.condensed[0].id == "1.1");
    CHECK(defs.condensed[0].market_base_rate == 2.0);
    CHECK(defs.condensed[1].id == "1.2");
    CHECK(defs.condensed[1].market_base_rate == 5.0);
  }
}

TEST_SUITE("winners") {
  TEST_CASE("basic mapping") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","eventId":"3","runners":[{"id":1,"status":"ACTIVE"},{"id":2,"status":"ACTIVE"},{"id":3,"status":"ACTIVE"}]}}]}
{"op":"mcm","pt":2,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED","runners":[{"id":1,"status":"WINNER"},{"id":2,"status":"LOSER"},{"id":3,"status":"LOSER"}]}}]})");
    Diagnostics diag;
    const auto w = extract_winners(collect_definitions(msgs), diag);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == WinnerRecord{"1.1", 1, "3", 3});
    CHECK(diag.empty());
  }

  TEST_CASE("runner removed mid-market still counts") {
    Diagnostics diag;
    const auto w = extract_winners(collect_definitions(testing::fixture_messages(kFixture)), diag);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == WinnerRecord{"1.122946937", 102, "30109871", 4});
    CHECK(diag.empty());
  }

  TEST_CASE("ten runners with one removed") {
    std::string open = R"({"op":"mcm","pt":1,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","runners":[)";
    std::string removed = R"({"op":"mcm","pt":2,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","runners":[)";
    std::string closed = R"({"op":"mcm","pt":3,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED","runners":[)";
    for (int i = 1; i <= 10; ++i) {
      const std::string sep = i > 1 ? "," : "";
      const std::string id = std::to_string(i);
      open += sep + R"({"id":)" + id + R"(,"status":"ACTIVE"})";
      removed += sep + R"({"id":)" + id + R"(,"status":")" + (i == 10 ? "REMOVED" : "ACTIVE") + "\"}";
      closed += sep + R"({"id":)" + id + R"(,"status":")" + (i == 10 ? "REMOVED" : i == 4 ? "WINNER" : "LOSER") +
                "\"}";
    }
    const std::string tail = "]}}]}\n";
    Diagnostics diag;
    const auto w = extract_winners(collect_definitions(testing::parse_lines(open + tail + removed + tail + closed + tail)),
                                   diag, "8");
    REQUIRE(w.size() == 1);
    CHECK(w[0].winner == 4);
    CHECK(w[0].number_of_runners == 10);
    CHECK(w[0].event_id == "8");
  }

  TEST_CASE("no winner is excluded with a warning") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","runners":[{"id":1,"status":"ACTIVE"},{"id":2,"status":"ACTIVE"},{"id":3,"status":"ACTIVE"}]}}]}
{"op":"mcm","pt":2,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED","runners":[{"id":1,"status":"LOSER"},{"id":2,"status":"LOSER"},{"id":3,"status":"LOSER"}]}}]})");
    Diagnostics diag;
    CHECK(extract_winners(collect_definitions(msgs), diag).empty());
    CHECK(diag.count("no_single_winner") == 1);
  }

  TEST_CASE("runner count outside the corpus profile warns") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","runners":[{"id":1,"status":"ACTIVE"},{"id":2,"status":"ACTIVE"}]}}]}
{"op":"mcm","pt":2,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED","runners":[{"id":1,"status":"WINNER"},{"id":2,"status":"LOSER"}]}}]})");
    Diagnostics diag;
    CHECK(extract_winners(collect_definitions(msgs), diag).size() == 1);
    CHECK(diag.count("runner_count_profile") == 1);
  }
}

TEST_SUITE("export") {
  TEST_CASE("header-only output for no records") {
    testing::TempDir dir("export_empty");
    export_csv(std::span<const RunnerChangeRecord>{}, dir.path / "rc.csv");
    const auto t = csv::read(dir.path / "rc.csv");
    CHECK(t.header == runner_change_columns());
    CHECK(t.rows.empty());
  }

  TEST_CASE("column sets") {
    CHECK(runner_change_columns() == std::vector<std::string>{"atb", "id", "t", "inPlay", "spn", "spf", "atl", "spl",
                                                              "trd", "ltp", "tv", "spb", "eventId", "marketId"});
    CHECK(definition_columns(false) ==
          std::vector<std::string>{"id", "turnInPlayEnabled", "marketBaseRate", "eventId", "marketTime",
                                   "suspendTime", "complete", "numberOfActiveRunners"});
    auto full = definition_columns(false);
    full.push_back("inPlay");
    CHECK(definition_columns(true) == full);
    CHECK(winner_columns() == std::vector<std::string>{"id", "winner", "eventId", "numberOfRunners"});
  }

  TEST_CASE("absent values are empty cells") {
    RunnerChangeRecord r;
    r.id = 5;
    r.t = "2021-01-01 00:00:00";
    r.tv = 12.5;
    r.event_id = "1";
    r.market_id = "1.1";
    const auto t = to_table(std::span<const RunnerChangeRecord>(&r, 1));
    REQUIRE(t.rows.size() == 1);
    REQUIRE(t.rows[0].size() == 14);
    CHECK(t.rows[0][9] == "");
    CHECK(t.rows[0][0] == "");
    CHECK(t.rows[0][10] == "12.5");
    CHECK(t.rows[0][3] == "false");
  }

  TEST_CASE("fixture round trip through the reader") {
    testing::TempDir dir("export_rt");
    const auto msgs = testing::fixture_messages(kFixture);
    Diagnostics diag;
    const auto recs = build_runner_change_dataset(msgs, diag);
    const auto defs = build_definition_datasets(msgs);
    const auto wins = extract_winners(collect_definitions(msgs), diag);
    export_csv(recs, dir.path / "rc.csv");
    export_csv(defs.full, true, dir.path / "full.csv");
    export_csv(defs.condensed, false, dir.path / "cond.csv");
    export_csv(wins, dir.path / "win.csv");

    const auto back = runner_changes_from_table(csv::read(dir.path / "rc.csv"));
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(back[i].same_columns(recs[i]));
    CHECK(definitions_from_table(csv::read(dir.path / "full.csv"), true) == defs.full);
    CHECK(definitions_from_table(csv::read(dir.path / "cond.csv"), false) == defs.condensed);
    CHECK(winners_from_table(csv::read(dir.path / "win.csv")) == wins);
  }

  TEST_CASE("ladder cells") {
    const ingest::PriceLadder l{{3.5, 10.0}, {3.45, 0.125}};
    CHECK(ladder_cell(l) == "[[3.5,10],[3.45,0.125]]");
    CHECK(parse_ladder_cell(ladder_cell(l)) == l);
    CHECK(ladder_cell(std::nullopt).empty());
    CHECK_FALSE(parse_ladder_cell(""));
  }

  TEST_CASE("wrong header is rejected") {
    csv::Table t{{"id", "winner"}, {}};
    CHECK_THROWS_AS(winners_from_table(t), SchemaError);
  }

  TEST_CASE("unwritable path") {
    testing::TempDir dir("export_bad");
    CHECK_THROWS(export_csv(std::span<const WinnerRecord>{}, dir.path / "missing" / "x" / "w.csv"));
  }
}
