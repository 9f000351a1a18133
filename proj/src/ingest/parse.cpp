#include "bfstats/ingest/parse.hpp"

#include <ctime>

#include "json.hpp"

#include "bfstats/errors.hpp"

namespace bfstats::ingest {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

class Decoder {
 public:
  explicit Decoder(ParseCounters* counters) : counters_(counters) {}

  MessageEnvelope envelope(const json& j) {
    require_object(j, "message");
    MessageEnvelope msg;
    bool have_pt = false;
    for (const auto& [key, value] : j.items()) {
      if (key == "op") {
        msg.op = string(value, key);
      } else if (key == "clk") {
        msg.clk = string(value, key);
      } else if (key == "pt") {
        if (!value.is_number_integer()) throw SchemaError("pt must be an integer millisecond timestamp");
        msg.pt = value.get<std::int64_t>();
        have_pt = true;
      } else if (key == "mc") {
        require_array(value, key);
        msg.mc.reserve(value.size());
        for (const auto& m : value) msg.mc.push_back(market_change(m));
      } else {
        unknown();
      }
    }
    if (!have_pt) throw SchemaError("missing pt");
    return msg;
  }

 private:
  MarketChange market_change(const json& j) {
    require_object(j, "mc entry");
    MarketChange mc;
    for (const auto& [key, value] : j.items()) {
      if (key == "id") {
        mc.id = id_string(value, key);
      } else if (key == "marketDefinition") {
        mc.market_definition = definition(value);
      } else if (key == "rc") {
        require_array(value, key);
        std::vector<RunnerChangeMsg> rcs;
        rcs.reserve(value.size());
        for (const auto& r : value) rcs.push_back(runner_change(r));
        mc.rc = std::move(rcs);
      } else if (key == "tv") {
        mc.tv = number(value, key);
      } else {
        unknown();
      }
    }
    return mc;
  }

  MarketDefinitionMsg definition(const json& j) {
    require_object(j, "marketDefinition");
    MarketDefinitionMsg d;
    for (const auto& [key, v] : j.items()) {
      if (key == "venue") d.venue = string(v, key);
      else if (key == "bspMarket") d.bsp_market = boolean(v, key);
      else if (key == "turnInPlayEnabled") d.turn_in_play_enabled = boolean(v, key);
      else if (key == "persistenceEnabled") d.persistence_enabled = boolean(v, key);
      else if (key == "marketBaseRate") d.market_base_rate = number(v, key);
      else if (key == "eventId") d.event_id = id_string(v, key);
      else if (key == "eventTypeId" || key == "eventType") d.event_type_id = id_string(v, key);
      else if (key == "numberOfWinners") d.number_of_winners = integer(v, key);
      else if (key == "bettingType") d.betting_type = string(v, key);
      else if (key == "marketType") d.market_type = string(v, key);
      else if (key == "marketTime") d.market_time = string(v, key);
      else if (key == "suspendTime") d.suspend_time = string(v, key);
      else if (key == "bspReconciled") d.bsp_reconciled = boolean(v, key);
      else if (key == "complete") d.complete = boolean(v, key);
      else if (key == "inPlay") d.in_play = boolean(v, key);
      else if (key == "crossMatching") d.cross_matching = boolean(v, key);
      else if (key == "runnersVoidable") d.runners_voidable = boolean(v, key);
      else if (key == "numberOfActiveRunners") d.number_of_active_runners = integer(v, key);
      else if (key == "betDelay") d.bet_delay = integer(v, key);
      else if (key == "status") d.status = string(v, key);
      else if (key == "regulators") {
        require_array(v, key);
        std::vector<std::string> regs;
        for (const auto& r : v) regs.push_back(string(r, key));
        d.regulators = std::move(regs);
      } else if (key == "discountAllowed") d.discount_allowed = boolean(v, key);
      else if (key == "timezone") d.timezone = string(v, key);
      else if (key == "openDate") d.open_date = string(v, key);
      else if (key == "version") d.version = integer(v, key);
      else if (key == "name") d.name = string(v, key);
      else if (key == "eventName") d.event_name = string(v, key);
      else if (key == "runners") {
        require_array(v, key);
        std::vector<RunnerDefinition> runners;
        runners.reserve(v.size());
        for (const auto& r : v) runners.push_back(runner_definition(r));
        d.runners = std::move(runners);
      } else {
        unknown();
      }
    }
    return d;
  }

  RunnerDefinition runner_definition(const json& j) {
    require_object(j, "runner definition");
    RunnerDefinition r;
    for (const auto& [key, v] : j.items()) {
      if (key == "id") r.id = integer(v, key);
      else if (key == "name") r.name = string(v, key);
      else if (key == "status") r.status = string(v, key);
      else if (key == "sortPriority") r.sort_priority = integer(v, key);
      else if (key == "removalDate") r.removal_date = string(v, key);
      else if (key == "adjustmentFactor") r.adjustment_factor = number(v, key);
      else if (key == "bsp") r.bsp = number(v, key);
      else if (key == "hc") r.hc = number(v, key);
      else unknown();
    }
    return r;
  }

  RunnerChangeMsg runner_change(const json& j) {
    require_object(j, "rc entry");
    RunnerChangeMsg rc;
    for (const auto& [key, v] : j.items()) {
      if (key == "id") rc.id = integer(v, key);
      else if (key == "ltp") rc.ltp = number(v, key);
      else if (key == "tv") rc.tv = number(v, key);
      else if (key == "trd") rc.trd = ladder(v, key);
      else if (key == "atb") rc.atb = ladder(v, key);
      else if (key == "atl") rc.atl = ladder(v, key);
      else if (key == "spb") rc.spb = ladder(v, key);
      else if (key == "spl") rc.spl = ladder(v, key);
      else if (key == "spn") rc.spn = number(v, key);
      else if (key == "spf") rc.spf = number(v, key);
      else if (key == "hc") rc.hc = number(v, key);
      else unknown();
    }
    return rc;
  }

  static PriceLadder ladder(const json& v, const std::string& key) {
    require_array(v, key);
    PriceLadder out;
    out.reserve(v.size());
    for (const auto& level : v) {
      if (!level.is_array() || level.size() != 2 || !level[0].is_number() || !level[1].is_number())
        throw SchemaError(key + ": ladder level must be [price, size]");
      out.push_back({level[0].get<double>(), level[1].get<double>()});
    }
    return out;
  }

  static void require_object(const json& v, const std::string& what) {
    if (!v.is_object()) throw SchemaError(what + " must be a JSON object");
  }
  static void require_array(const json& v, const std::string& key) {
    if (!v.is_array()) throw SchemaError(key + " must be a JSON array");
  }
  static std::string string(const json& v, const std::string& key) {
    if (!v.is_string()) throw SchemaError(key + " must be a string");
    return v.get<std::string>();
  }
  // Identifiers appear both quoted and bare in exchange exports.
  static std::string id_string(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw SchemaError(key + " must be a string or integer identifier");
  }
  static double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw SchemaError(key + " must be a number");
    return v.get<double>();
  }
  static std::int64_t integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw SchemaError(key + " must be an integer");
    return v.get<std::int64_t>();
  }
  static bool boolean(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw SchemaError(key + " must be a boolean");
    return v.get<bool>();
  }
  void unknown() {
    if (counters_) ++counters_->unknown_fields;
  }

  ParseCounters* counters_;
};

template <typename T>
void put(ojson& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

ojson ladder_json(const PriceLadder& ladder) {
  ojson arr = ojson::array();
  for (const auto& l : ladder) arr.push_back(ojson::array({l.price, l.size}));
  return arr;
}

void put(ojson& j, const char* key, const std::optional<PriceLadder>& v) {
  if (v) j[key] = ladder_json(*v);
}

ojson definition_json(const MarketDefinitionMsg& d) {
  ojson j = ojson::object();
  put(j, "venue", d.venue);
  put(j, "bspMarket", d.bsp_market);
  put(j, "turnInPlayEnabled", d.turn_in_play_enabled);
  put(j, "persistenceEnabled", d.persistence_enabled);
  put(j, "marketBaseRate", d.market_base_rate);
  put(j, "eventId", d.event_id);
  put(j, "eventTypeId", d.event_type_id);
  put(j, "numberOfWinners", d.number_of_winners);
  put(j, "bettingType", d.betting_type);
  put(j, "marketType", d.market_type);
  put(j, "marketTime", d.market_time);
  put(j, "suspendTime", d.suspend_time);
  put(j, "bspReconciled", d.bsp_reconciled);
  put(j, "complete", d.complete);
  put(j, "inPlay", d.in_play);
  put(j, "crossMatching", d.cross_matching);
  put(j, "runnersVoidable", d.runners_voidable);
  put(j, "numberOfActiveRunners", d.number_of_active_runners);
  put(j, "betDelay", d.bet_delay);
  put(j, "status", d.status);
  put(j, "regulators", d.regulators);
  put(j, "discountAllowed", d.discount_allowed);
  put(j, "timezone", d.timezone);
  put(j, "openDate", d.open_date);
  put(j, "version", d.version);
  put(j, "name", d.name);
  put(j, "eventName", d.event_name);
  if (d.runners) {
    ojson arr = ojson::array();
    for (const auto& r : *d.runners) {
      ojson rj = ojson::object();
      put(rj, "status", r.status);
      put(rj, "sortPriority", r.sort_priority);
      put(rj, "removalDate", r.removal_date);
      rj["id"] = r.id;
      put(rj, "name", r.name);
      put(rj, "adjustmentFactor", r.adjustment_factor);
      put(rj, "bsp", r.bsp);
      put(rj, "hc", r.hc);
      arr.push_back(std::move(rj));
    }
    j["runners"] = std::move(arr);
  }
  return j;
}

ojson runner_change_json(const RunnerChangeMsg& rc) {
  ojson j = ojson::object();
  put(j, "atb", rc.atb);
  put(j, "atl", rc.atl);
  put(j, "spn", rc.spn);
  put(j, "spf", rc.spf);
  put(j, "spb", rc.spb);
  put(j, "spl", rc.spl);
  put(j, "trd", rc.trd);
  put(j, "ltp", rc.ltp);
  put(j, "tv", rc.tv);
  put(j, "hc", rc.hc);
  j["id"] = rc.id;
  return j;
}

}  // namespace

MessageEnvelope parse_message(std::string_view line, std::size_t line_no, ParseCounters* counters) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (counters) ++counters->lines;
  try {
    return Decoder(counters).envelope(j);
  } catch (const SchemaError& e) {
    throw SchemaError(line_no ? "line " + std::to_string(line_no) + ": " + e.what() : e.what());
  }
}

std::string serialize_message(const MessageEnvelope& msg) {
  ojson j = ojson::object();
  j["op"] = msg.op;
  put(j, "clk", msg.clk);
  j["pt"] = msg.pt;
  ojson mcs = ojson::array();
  for (const auto& mc : msg.mc) {
    ojson m = ojson::object();
    m["id"] = mc.id;
    if (mc.market_definition) m["marketDefinition"] = definition_json(*mc.market_definition);
    if (mc.rc) {
      ojson rcs = ojson::array();
      for (const auto& rc : *mc.rc) rcs.push_back(runner_change_json(rc));
      m["rc"] = std::move(rcs);
    }
    put(m, "tv", mc.tv);
    mcs.push_back(std::move(m));
  }
  j["mc"] = std::move(mcs);
  return j.dump();
}

std::string format_time(std::int64_t pt_ms) {
  if (pt_ms < 0) throw DomainError("format_time: negative publish time");
  const std::time_t secs = static_cast<std::time_t>(pt_ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &tm);
  return buf;
}

}  // namespace bfstats::ingest
