#include "bfstats/market/state.hpp"

#include <algorithm>

#include "bfstats/errors.hpp"

namespace bfstats::market {

void apply_ladder_delta(PriceLadder& ladder, const PriceLadder& delta, bool descending) {
  for (const auto& level : delta) {
    auto it = std::find_if(ladder.begin(), ladder.end(), [&](const auto& l) { return l.price == level.price; });
    if (level.size == 0.0) {
      if (it != ladder.end()) ladder.erase(it);
    } else if (it != ladder.end()) {
      it->size = level.size;
    } else {
      ladder.push_back(level);
    }
  }
  if (descending)
    std::sort(ladder.begin(), ladder.end(), [](const auto& a, const auto& b) { return a.price > b.price; });
  else
    std::sort(ladder.begin(), ladder.end(), [](const auto& a, const auto& b) { return a.price < b.price; });
}

namespace {

void apply_definition(MarketState& state, const ingest::MarketDefinitionMsg& def) {
  state.has_definition = true;
  if (def.event_id) state.event_id = *def.event_id;
  if (def.in_play) state.in_play = *def.in_play;
  if (def.status) state.status = *def.status;
  if (def.market_base_rate) state.market_base_rate = def.market_base_rate;
  if (def.runners) {
    for (const auto& r : *def.runners) {
      auto& rs = state.runners[r.id];
      rs.id = r.id;
      if (r.status) rs.status = *r.status;
      if (r.hc) rs.hc = r.hc;
    }
    state.number_of_active_runners = std::count_if(state.runners.begin(), state.runners.end(),
                                                   [](const auto& kv) { return kv.second.status == "ACTIVE"; });
  } else if (def.number_of_active_runners) {
    state.number_of_active_runners = *def.number_of_active_runners;
  }
}

void apply_runner_change(MarketState& state, const ingest::RunnerChangeMsg& rc) {
  auto& rs = state.runners[rc.id];
  rs.id = rc.id;
  if (rc.ltp) rs.ltp = rc.ltp;
  if (rc.tv) rs.tv = rc.tv;
  if (rc.spn) rs.spn = rc.spn;
  if (rc.spf) rs.spf = rc.spf;
  if (rc.hc) rs.hc = rc.hc;
  if (rc.atb) apply_ladder_delta(rs.atb, *rc.atb, true);
  if (rc.atl) apply_ladder_delta(rs.atl, *rc.atl, false);
  if (rc.trd) apply_ladder_delta(rs.trd, *rc.trd, false);
  if (rc.spb) apply_ladder_delta(rs.spb, *rc.spb, true);
  if (rc.spl) apply_ladder_delta(rs.spl, *rc.spl, false);
}

}  // namespace

MarketState apply_delta(MarketState state, std::int64_t pt, const ingest::MarketChange& change) {
  if (state.market_id.empty()) {
    state.market_id = change.id;
  } else if (change.id != state.market_id) {
    throw ContractViolation("apply_delta: change for market " + change.id + " applied to state of " +
                            state.market_id);
  }
  if (change.market_definition) apply_definition(state, *change.market_definition);
  if (change.rc)
    for (const auto& rc : *change.rc) apply_runner_change(state, rc);
  state.last_pt = pt;
  return state;
}

MarketState apply_delta(MarketState state, const ingest::MessageEnvelope& msg) {
  for (const auto& mc : msg.mc) state = apply_delta(std::move(state), msg.pt, mc);
  state.last_pt = msg.pt;
  return state;
}

}  // namespace bfstats::market
