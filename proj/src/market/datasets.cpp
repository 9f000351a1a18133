#include "bfstats/market/datasets.hpp"

#include <algorithm>
#include <set>

#include "bfstats/ingest/parse.hpp"

namespace bfstats::market {

bool RunnerChangeRecord::same_columns(const RunnerChangeRecord& o) const {
  return atb == o.atb && id == o.id && t == o.t && in_play == o.in_play && spn == o.spn && spf == o.spf &&
         atl == o.atl && spl == o.spl && trd == o.trd && ltp == o.ltp && tv == o.tv && spb == o.spb &&
         event_id == o.event_id && market_id == o.market_id;
}

DefinitionHistory collect_definitions(std::span<const MessageEnvelope> messages) {
  DefinitionHistory history;
  for (const auto& msg : messages)
    for (const auto& mc : msg.mc)
      if (mc.market_definition) history[mc.id].push_back({msg.pt, *mc.market_definition});
  return history;
}

namespace {

struct InPlayPoint {
  std::int64_t pt;
  bool in_play;
};

// Per market: definitions ordered by pt (stable), with inPlay carried
// forward when a definition omits it.
std::map<std::string, std::vector<InPlayPoint>> in_play_timelines(const DefinitionHistory& history) {
  std::map<std::string, std::vector<InPlayPoint>> out;
  for (const auto& [market, defs] : history) {
    std::vector<const TimedDefinition*> ordered;
    for (const auto& d : defs) ordered.push_back(&d);
    std::stable_sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->pt < b->pt; });
    bool current = false;
    auto& line = out[market];
    for (const auto* d : ordered) {
      if (d->definition.in_play) current = *d->definition.in_play;
      line.push_back({d->pt, current});
    }
  }
  return out;
}

std::string event_of(const std::vector<TimedDefinition>& defs, const std::string& fallback) {
  for (const auto& d : defs)
    if (d.definition.event_id) return *d.definition.event_id;
  return fallback;
}

}  // namespace

std::vector<RunnerChangeRecord> build_runner_change_dataset(std::span<const MessageEnvelope> messages,
                                                            Diagnostics& diag,
                                                            const std::string& fallback_event_id) {
  const DefinitionHistory history = collect_definitions(messages);
  const auto timelines = in_play_timelines(history);
  std::map<std::string, std::string> events;
  for (const auto& [market, defs] : history) events[market] = event_of(defs, fallback_event_id);

  std::vector<RunnerChangeRecord> records;
  std::set<std::string> warned;
  for (const auto& msg : messages) {
    for (const auto& mc : msg.mc) {
      if (!mc.rc) continue;
      bool in_play = false;
      auto tl = timelines.find(mc.id);
      bool joined = false;
      if (tl != timelines.end()) {
        const auto& line = tl->second;
        auto it = std::upper_bound(line.begin(), line.end(), msg.pt,
                                   [](std::int64_t pt, const InPlayPoint& p) { return pt < p.pt; });
        if (it != line.begin()) {
          in_play = std::prev(it)->in_play;
          joined = true;
        }
      }
      if (!joined && warned.insert(mc.id).second)
        diag.warn("rc_before_definition", mc.id, "runner change before any market definition; inPlay=false");

      auto ev = events.find(mc.id);
      const std::string& event_id = ev != events.end() ? ev->second : fallback_event_id;
      const std::string t = ingest::format_time(msg.pt);
      for (const auto& rc : *mc.rc) {
        RunnerChangeRecord r;
        r.atb = rc.atb;
        r.id = rc.id;
        r.t = t;
        r.in_play = in_play;
        r.spn = rc.spn;
        r.spf = rc.spf;
        r.atl = rc.atl;
        r.spl = rc.spl;
        r.trd = rc.trd;
        r.ltp = rc.ltp;
        r.tv = rc.tv;
        r.spb = rc.spb;
        r.event_id = event_id;
        r.market_id = mc.id;
        r.pt = msg.pt;
        records.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.pt < b.pt; });
  return records;
}

DefinitionDatasets build_definition_datasets(std::span<const MessageEnvelope> messages,
                                             const std::string& fallback_event_id) {
  DefinitionDatasets out;
  const DefinitionHistory history = collect_definitions(messages);

  for (const auto& [market, defs] : history) {
    const std::string event_id = event_of(defs, fallback_event_id);
    bool in_play = false;
    std::string status;
    bool seen_open = false;
    std::optional<std::size_t> representative;
    const std::size_t first_row = out.full.size();

    for (std::size_t i = 0; i < defs.size(); ++i) {
      const auto& d = defs[i].definition;
      if (d.in_play) in_play = *d.in_play;
      if (d.status) status = *d.status;
      if (!representative) {
        if (status == "OPEN") seen_open = true;
        else if (seen_open) representative = i - 1;
      }
      MarketDefinitionRecord r;
      r.id = market;
      r.turn_in_play_enabled = d.turn_in_play_enabled;
      r.market_base_rate = d.market_base_rate;
      r.event_id = d.event_id.value_or(event_id);
      r.market_time = d.market_time;
      r.suspend_time = d.suspend_time;
      r.complete = d.complete;
      r.number_of_active_runners = d.number_of_active_runners;
      r.in_play = in_play;
      out.full.push_back(std::move(r));
    }
    MarketDefinitionRecord rep = out.full[first_row + representative.value_or(defs.size() - 1)];
    rep.in_play.reset();
    out.condensed.push_back(std::move(rep));
  }
  return out;
}

std::vector<WinnerRecord> extract_winners(const DefinitionHistory& history, Diagnostics& diag,
                                          const std::string& fallback_event_id) {
  std::vector<WinnerRecord> out;
  for (const auto& [market, defs] : history) {
    std::set<std::int64_t> ever_active;
    std::string status;
    const std::vector<ingest::RunnerDefinition>* final_runners = nullptr;
    for (const auto& td : defs) {
      const auto& d = td.definition;
      if (d.status) status = *d.status;
      if (!d.runners) continue;
      final_runners = &*d.runners;
      if (status != "OPEN") continue;
      for (const auto& r : *d.runners)
        if (r.status && *r.status == "ACTIVE") ever_active.insert(r.id);
    }

    std::vector<std::int64_t> winners;
    if (final_runners)
      for (const auto& r : *final_runners)
        if (r.status && *r.status == "WINNER") winners.push_back(r.id);
    if (winners.size() != 1) {
      diag.warn("no_single_winner", market,
                std::to_string(winners.size()) + " runners with status WINNER; market excluded");
      continue;
    }

    WinnerRecord w;
    w.id = market;
    w.winner = winners.front();
    w.event_id = event_of(defs, fallback_event_id);
    w.number_of_runners = static_cast<std::int64_t>(ever_active.size());
    if (w.number_of_runners < 3 || w.number_of_runners > 21)
      diag.warn("runner_count_profile", market,
                "numberOfRunners " + std::to_string(w.number_of_runners) + " outside [3, 21]");
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace bfstats::market
