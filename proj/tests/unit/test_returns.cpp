#include <algorithm>
#include <cmath>
#include <random>

#include "bfstats/market/datasets.hpp"
#include "bfstats/returns/returns.hpp"
#include "bfstats/returns/settlement.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bfstats;
using namespace bfstats::returns;
using doctest::Approx;

namespace {

std::vector<PricePoint> path(std::initializer_list<double> prices) {
  std::vector<PricePoint> out;
  std::int64_t t = 0;
  for (double p : prices) out.push_back({t += 1000, p});
  return out;
}

std::vector<PricePoint> random_path(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(1.01, 50.0);
  std::vector<PricePoint> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({static_cast<std::int64_t>(i), u(rng)});
  return out;
}

market::RunnerChangeRecord rc(std::int64_t pt, const std::string& market, std::int64_t id, std::optional<double> ltp,
                              std::optional<double> tv) {
  market::RunnerChangeRecord r;
  r.pt = pt;
  r.market_id = market;
  r.event_id = "1";
  r.id = id;
  r.ltp = ltp;
  r.tv = tv;
  return r;
}

SettlementReturnRecord rec(std::int64_t t, const std::string& market, double net) {
  SettlementReturnRecord r;
  r.t = t;
  r.market_id = market;
  r.net_return = net;
  return r;
}

}  // namespace

TEST_SUITE("price returns") {
  TEST_CASE("log returns") {
    const double e = std::exp(1.0);
    const auto ladder = log_returns(path({1.0, e, e * e}), "1.1");
    REQUIRE(ladder.size() == 2);
    CHECK(ladder.values(0) == Approx(1.0).epsilon(1e-15));
    CHECK(ladder.values(1) == Approx(1.0).epsilon(1e-15));
    CHECK(ladder.kind == ReturnKind::log);
    CHECK(ladder.market_id == "1.1");
    CHECK(ladder.t == std::vector<std::int64_t>{2000, 3000});

    const auto flat = log_returns(path({3.0, 3.0, 3.0}));
    CHECK(flat.values.isZero(0.0));

    const auto one = log_returns(path({2.0, 2.2}));
    REQUIRE(one.size() == 1);
    CHECK(one.values(0) == Approx(0.0953102).epsilon(1e-6));
  }

  TEST_CASE("absent prices are skipped; short input is empty") {
    std::vector<PricePoint> p{{1, 2.0}, {2, std::nullopt}, {3, 4.0}};
    const auto r = log_returns(p);
    REQUIRE(r.size() == 1);
    CHECK(r.values(0) == Approx(std::log(2.0)));
    CHECK(r.t[0] == 3);
    CHECK(log_returns(path({2.0})).size() == 0);
    CHECK(log_returns(std::vector<PricePoint>{}).size() == 0);
  }

  TEST_CASE("non-positive price names the tick") {
    try {
      log_returns(path({2.0, 0.0}));
      FAIL("expected a domain error");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("2000") != std::string::npos);
    }
    CHECK_THROWS_AS(simple_returns(path({-1.0, 2.0})), DomainError);
  }

  TEST_CASE("simple returns") {
    const auto r = simple_returns(path({2.0, 2.2}));
    REQUIRE(r.size() == 1);
    CHECK(r.values(0) == Approx(0.1).epsilon(1e-14));
    CHECK(r.kind == ReturnKind::simple);
    CHECK(simple_returns(path({5.0, 5.0})).values.isZero(0.0));
    CHECK(std::abs(std::log1p(r.values(0)) - log_returns(path({2.0, 2.2})).values(0)) < 1e-12);
  }

  TEST_CASE("conversion") {
    ReturnSeries zero{"x", {1}, Eigen::VectorXd::Zero(1), ReturnKind::log, 1.0};
    CHECK(convert(zero, Conversion::log_to_simple).values(0) == 0.0);
    ReturnSeries half{"x", {1}, Eigen::VectorXd::Constant(1, -0.5), ReturnKind::simple, 1.0};
    CHECK(convert(half, Conversion::simple_to_log).values(0) == Approx(-0.693147).epsilon(1e-6));

    ReturnSeries bad{"x", {1}, Eigen::VectorXd::Constant(1, -1.0), ReturnKind::simple, 1.0};
    CHECK_THROWS_AS(convert(bad, Conversion::simple_to_log), DomainError);
    CHECK_THROWS_AS(convert(zero, Conversion::simple_to_log), DomainError);
    CHECK_THROWS_AS(convert(half, Conversion::log_to_simple), DomainError);
  }

  TEST_CASE("conversion round trip and inversion property") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
      const auto p = random_path(rng, 200);
      const auto lr = log_returns(p);
      const auto sr = simple_returns(p);
      const auto via = convert(sr, Conversion::simple_to_log);
      CHECK((via.values - lr.values).cwiseAbs().maxCoeff() < 1e-12);
      const auto back = convert(convert(lr, Conversion::log_to_simple), Conversion::simple_to_log);
      CHECK((back.values - lr.values).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(back.kind == ReturnKind::log);
    }
  }

  TEST_CASE("time additivity") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      const auto p = random_path(rng, 500);
      const auto lr = log_returns(p);
      CHECK(std::abs(lr.values.sum() - (std::log(*p.back().price) - std::log(*p.front().price))) < 1e-10);
    }
  }

  TEST_CASE("transform and scale") {
    ReturnSeries s{"x", {1, 2}, Eigen::Vector2d(-1.0, 2.0), ReturnKind::log, 1.0};
    const auto a = transform(s, ReturnKind::absolute);
    CHECK(a.values == Eigen::Vector2d(1.0, 2.0));
    CHECK(a.kind == ReturnKind::absolute);
    const auto q = transform(s, ReturnKind::squared);
    CHECK(q.values == Eigen::Vector2d(1.0, 4.0));
    CHECK(transform(q, ReturnKind::absolute).values == q.values);
    const auto k = scaled(s, 100.0);
    CHECK(k.values == Eigen::Vector2d(-100.0, 200.0));
    CHECK(k.scale == 100.0);
    CHECK(k.t == s.t);
  }
}

TEST_SUITE("market series") {
  TEST_CASE("ltp paths keep changed prices only") {
    std::vector<market::RunnerChangeRecord> recs{rc(1, "1.1", 1, 2.0, {}), rc(2, "1.1", 1, 2.0, 5.0),
                                                 rc(3, "1.1", 1, {}, 6.0), rc(4, "1.1", 1, 2.2, {}),
                                                 rc(5, "1.1", 2, 3.0, {})};
    const auto paths = ltp_paths(recs);
    REQUIRE(paths.size() == 2);
    const auto& p = paths.at({"1.1", 1});
    REQUIRE(p.size() == 2);
    CHECK(p[0].t == 1);
    CHECK(p[1].t == 4);
    CHECK(*p[1].price == 2.2);
  }

  TEST_CASE("fixture market log returns") {
    const auto msgs = testing::fixture_messages("market_1.122946937.jsonl");
    Diagnostics diag;
    const auto recs = market::build_runner_change_dataset(msgs, diag);
    const auto series = market_log_returns(recs);
    REQUIRE(series.size() == 1);
    const auto& s = series.at("1.122946937");
    REQUIRE(s.size() == 2);
    CHECK(s.values(0) == Approx(std::log(3.4 / 3.5)).epsilon(1e-14));
    CHECK(s.values(1) == Approx(std::log(1.9 / 2.0)).epsilon(1e-14));
    CHECK(s.t == std::vector<std::int64_t>{1609459320000, 1609460010000});
  }

  TEST_CASE("concat series merges by time") {
    ReturnSeries a{"1.1", {1, 5, 9}, Eigen::Vector3d(1, 5, 9), ReturnKind::log, 1.0};
    ReturnSeries b{"1.2", {2, 5, 10}, Eigen::Vector3d(2, 6, 10), ReturnKind::log, 1.0};
    const std::vector<ReturnSeries> parts{a, b};
    const auto c = concat_series(parts);
    CHECK(c.market_id == "combined");
    CHECK(c.t == std::vector<std::int64_t>{1, 2, 5, 5, 9, 10});
    CHECK(c.values(2) == 5.0);
    CHECK(c.values(3) == 6.0);
    b.kind = ReturnKind::simple;
    const std::vector<ReturnSeries> mixed{a, b};
    CHECK_THROWS(concat_series(mixed));
  }
}

TEST_SUITE("settlement") {
  TEST_CASE("payoff hand cases") {
    CHECK(back_net_return(10, 2.0, true, 0.05) == Approx(9.5));
    CHECK(back_net_return(10, 7.3, false, 0.05) == -10.0);
    CHECK(lay_net_return(10, 2.0, false, 0.05) == Approx(9.5));
    CHECK(lay_net_return(10, 2.0, true, 0.05) == -10.0);
  }

  TEST_CASE("commission monotonicity") {
    for (double odds : {1.5, 2.0, 10.0}) {
      double prev_back = INFINITY, prev_lay = INFINITY;
      for (double c = 0.0; c < 0.99; c += 0.05) {
        const double b = back_net_return(10, odds, true, c);
        const double l = lay_net_return(10, odds, false, c);
        CHECK(b <= prev_back);
        CHECK(l <= prev_lay);
        prev_back = b;
        prev_lay = l;
        CHECK(back_net_return(10, odds, false, c) == back_net_return(10, odds, false, 0.0));
        CHECK(lay_net_return(10, odds, true, c) == lay_net_return(10, odds, true, 0.0));
      }
    }
  }

  TEST_CASE("commission policy") {
    const auto msgs = testing::parse_lines(
        R"({"op":"mcm","pt":1,"mc":[{"id":"1.1","marketDefinition":{"marketBaseRate":2}}]}
{"op":"mcm","pt":1,"mc":[{"id":"1.2","marketDefinition":{"status":"OPEN"}}]})");
    const auto policy = commission_from_definitions(market::collect_definitions(msgs));
    CHECK(policy.rate_for("1.1") == Approx(0.02));
    CHECK(policy.rate_for("1.2") == 0.05);
    CHECK(commission_from_definitions(market::collect_definitions(msgs), 0.05, 0.0).rate_for("1.1") == 0.0);
  }

  TEST_CASE("fixture settlement") {
    const auto msgs = testing::fixture_messages("market_1.122946937.jsonl");
    Diagnostics diag;
    const auto recs = market::build_runner_change_dataset(msgs, diag);
    const auto defs = market::collect_definitions(msgs);
    const auto winners = market::extract_winners(defs, diag);
    const auto split = settlement_returns(recs, winners, commission_from_definitions(defs), diag);
    CHECK(diag.empty());
    REQUIRE(split.positive.size() == 6);
    REQUIRE(split.negative.size() == 6);
    CHECK(split.zero == 0);

    std::vector<double> pos, neg;
    for (const auto& r : split.positive) pos.push_back(r.net_return);
    for (const auto& r : split.negative) neg.push_back(r.net_return);
    const std::vector<double> want_pos{19.0, 47.5, 14.25, 9.5, 9.5, 25.65};
    const std::vector<double> want_neg{-20.0, -50.0, -15.0, -10.0, -10.0, -27.0};
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(pos[i] == Approx(want_pos[i]).epsilon(1e-12));
      CHECK(neg[i] == Approx(want_neg[i]).epsilon(1e-12));
    }
    CHECK(split.positive[1].side == Side::back);
    CHECK(split.positive[1].selection_id == 102);
    CHECK(split.positive[1].stake == 50.0);
    CHECK(split.positive[1].odds == 2.0);
    CHECK(split.negative[5].side == Side::lay);
    CHECK(split.negative[5].odds == 1.9);
    for (const auto& r : split.positive) CHECK(r.positive());
    for (const auto& r : split.negative) CHECK_FALSE(r.positive());
  }

  TEST_CASE("falling volume and missing winner warn") {
    std::vector<market::RunnerChangeRecord> recs{rc(1, "1.1", 1, 2.0, 10.0), rc(2, "1.1", 1, {}, 8.0),
                                                 rc(3, "1.1", 1, {}, 12.0), rc(4, "1.2", 5, 3.0, 4.0),
                                                 rc(5, "1.2", 5, 3.0, 6.0)};
    const std::vector<market::WinnerRecord> winners{{"1.1", 1, "1", 3}};
    Diagnostics diag;
    const auto split = settlement_returns(recs, winners, CommissionPolicy{}, diag);
    CHECK(diag.count("traded_volume_decrease") == 1);
    CHECK(diag.count("missing_winner") == 1);
    // 1.1: rise of 10 then of 2 (from 10, the last accepted level).
    REQUIRE(split.positive.size() == 2);
    CHECK(split.positive[0].stake == 10.0);
    CHECK(split.positive[1].stake == 2.0);
    for (const auto& r : split.positive) CHECK(r.market_id == "1.1");
  }

  TEST_CASE("zero returns are counted, not listed") {
    // Full commission zeroes the layer's winnings on a losing runner.
    const std::vector<market::RunnerChangeRecord> recs{rc(1, "1.1", 2, 2.0, 10.0)};
    const std::vector<market::WinnerRecord> winners{{"1.1", 1, "1", 3}};
    CommissionPolicy all;
    all.override_rate = 1.0;
    Diagnostics diag;
    const auto split = settlement_returns(recs, winners, all, diag);
    CHECK(split.zero == 1);
    CHECK(split.negative.size() == 1);
    CHECK(split.positive.empty());
  }

  TEST_CASE("concat returns") {
    const std::vector<std::vector<SettlementReturnRecord>> parts{
        {rec(1, "a", 1), rec(4, "a", 2), rec(9, "a", 3)}, {rec(2, "b", 4), rec(3, "b", 5), rec(4, "b", 6), rec(8, "b", 7)}};
    const auto all = concat_returns(parts);
    REQUIRE(all.size() == 7);
    std::vector<std::int64_t> ts;
    for (const auto& r : all) ts.push_back(r.t);
    CHECK(std::is_sorted(ts.begin(), ts.end()));
    CHECK(all[3].market_id == "a");
    CHECK(all[4].market_id == "b");
    CHECK(concat_returns(std::vector<std::vector<SettlementReturnRecord>>{}).empty());
    CHECK(concat_returns(std::vector<std::vector<SettlementReturnRecord>>{{}, {}}).empty());
  }

  TEST_CASE("concat returns matches a full-sort oracle") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::int64_t> t(0, 50);
    std::vector<std::vector<SettlementReturnRecord>> parts(4);
    double tag = 0;
    for (auto& p : parts) {
      for (int i = 0; i < 30; ++i) p.push_back(rec(t(rng), "m", ++tag));
      std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    }
    std::vector<SettlementReturnRecord> oracle;
    for (const auto& p : parts) oracle.insert(oracle.end(), p.begin(), p.end());
    std::stable_sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    CHECK(concat_returns(parts) == oracle);
  }

  TEST_CASE("csv round trip") {
    std::vector<SettlementReturnRecord> rs{{10, "e", "1.1", 7, Side::back, 2.5, 3.45, -2.5},
                                           {11, "e", "1.1", 7, Side::lay, 2.5, 3.45, 2.375}};
    CHECK(settlement_from_table(to_table(rs)) == rs);
    csv::Table bad{{"t", "eventId"}, {}};
    CHECK_THROWS_AS(settlement_from_table(bad), SchemaError);
  }
}
