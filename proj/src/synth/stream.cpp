#include "bfstats/synth/stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "bfstats/errors.hpp"
#include "bfstats/ingest/archive.hpp"
#include "bfstats/ingest/parse.hpp"
#include "bfstats/synth/series.hpp"
#include "bfstats/synth/ticks.hpp"

namespace bfstats::synth {

using namespace bfstats::ingest;

namespace {

std::string iso_time(std::int64_t pt) {
  std::string s = format_time(pt);
  s[10] = 'T';
  return s + ".000Z";
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

struct Runner {
  std::int64_t id = 0;
  std::string status = "ACTIVE";
  int tick = 0;
  double tv = 0.0;
  std::optional<double> best_back;
  std::optional<double> best_lay;
  std::map<double, double> traded;
  std::optional<std::string> removal_date;
  std::optional<double> adjustment_factor;
};

class MarketGenerator {
 public:
  MarketGenerator(const SyntheticStreamSpec& spec, int index, Engine& rng) : spec_(spec), index_(index), rng_(rng) {}

  SyntheticMarketFile run() {
    SyntheticMarketFile out;
    out.market_id = "1.2" + std::to_string(10000000 + index_);
    out.event_id = std::to_string(30000000 + index_ / std::max(1, spec_.markets_per_event));
    market_id_ = out.market_id;
    event_id_ = out.event_id;

    boost::random::uniform_int_distribution<int> runner_count(spec_.runners_min, spec_.runners_max);
    const int n_runners = runner_count(rng_);
    out.runners = n_runners;
    seed_runners(n_runners);

    const int total = spec_.messages;
    std::vector<std::int64_t> pts = publish_times(total);
    const int suspend_at = static_cast<int>(0.7 * total);
    const int in_play_at = suspend_at + 1;
    const int close_at = total - 1;
    int removal_at = -1;
    if (n_runners >= 4 && uniform_() < 0.3) removal_at = std::max(2, total / 5);

    market_time_ = iso_time(pts[static_cast<std::size_t>(in_play_at)]);
    open_date_ = market_time_;

    std::string text;
    for (int i = 0; i < total; ++i) {
      MessageEnvelope msg;
      msg.op = "mcm";
      msg.clk = std::to_string(1000 + i);
      msg.pt = pts[static_cast<std::size_t>(i)];
      MarketChange mc;
      mc.id = market_id_;
      if (i == 0) {
        mc.market_definition = definition("OPEN", false);
      } else if (i == removal_at) {
        remove_runner(msg.pt);
        mc.market_definition = definition("OPEN", false);
      } else if (i == suspend_at) {
        mc.market_definition = definition("SUSPENDED", false);
      } else if (i == in_play_at) {
        mc.market_definition = definition("OPEN", true);
      } else if (i == close_at) {
        out.winner = settle();
        mc.market_definition = definition("CLOSED", true);
      } else {
        mc.rc = runner_changes(i == 1);
        out.runner_change_entries += static_cast<int>(mc.rc->size());
      }
      msg.mc.push_back(std::move(mc));
      text += serialize_message(msg);
      text += '\n';
    }
    out.text = std::move(text);
    return out;
  }

 private:
  void seed_runners(int n) {
    boost::random::gamma_distribution<double> weight(1.5, 1.0);
    std::vector<double> w(static_cast<std::size_t>(n));
    double total = 0;
    for (auto& x : w) total += (x = weight(rng_));
    for (int r = 0; r < n; ++r) {
      Runner runner;
      runner.id = 10000000 + static_cast<std::int64_t>(index_) * 100 + r + 1;
      const double odds = std::clamp(total / w[static_cast<std::size_t>(r)], 1.05, 900.0);
      runner.tick = tick_index(odds);
      runners_.push_back(runner);
    }
  }

  std::vector<std::int64_t> publish_times(int total) {
    // Lognormal gaps with the requested mean and standard deviation.
    const double m = spec_.mean_gap_s, s = spec_.sd_gap_s;
    const double sigma2 = std::log(1.0 + (s * s) / (m * m));
    boost::random::lognormal_distribution<double> gap(std::log(m) - sigma2 / 2, std::sqrt(sigma2));
    std::vector<std::int64_t> pts(static_cast<std::size_t>(total));
    std::int64_t pt = spec_.start_pt + static_cast<std::int64_t>(index_) * 15 * 60 * 1000;
    for (auto& p : pts) {
      p = pt;
      pt += static_cast<std::int64_t>(gap(rng_) * 1000.0);
    }
    return pts;
  }

  MarketDefinitionMsg definition(const std::string& status, bool in_play) {
    MarketDefinitionMsg d;
    d.bsp_market = true;
    d.turn_in_play_enabled = true;
    d.persistence_enabled = true;
    d.market_base_rate = 5.0;
    d.event_id = event_id_;
    d.event_type_id = "7";
    d.number_of_winners = 1;
    d.betting_type = "ODDS";
    d.market_type = "WIN";
    d.market_time = market_time_;
    d.suspend_time = market_time_;
    d.bsp_reconciled = in_play;
    d.complete = true;
    d.in_play = in_play;
    d.cross_matching = !in_play;
    d.runners_voidable = false;
    d.bet_delay = in_play ? 5 : 0;
    d.status = status;
    d.regulators = std::vector<std::string>{"MR_INT"};
    d.discount_allowed = true;
    d.timezone = "Europe/London";
    d.open_date = open_date_;
    d.version = ++version_;
    d.name = "R" + std::to_string(index_ % 8 + 1) + " 1m Hcap";
    d.event_name = "Synthetic Park " + event_id_;
    d.venue = "Synthetic Park";

    std::vector<RunnerDefinition> defs;
    std::int64_t active = 0;
    for (std::size_t r = 0; r < runners_.size(); ++r) {
      const auto& runner = runners_[r];
      RunnerDefinition rd;
      rd.id = runner.id;
      rd.name = "Runner " + std::to_string(r + 1);
      rd.status = runner.status;
      rd.sort_priority = static_cast<std::int64_t>(r + 1);
      rd.removal_date = runner.removal_date;
      rd.adjustment_factor = runner.adjustment_factor;
      active += runner.status == "ACTIVE";
      defs.push_back(std::move(rd));
    }
    d.number_of_active_runners = active;
    d.runners = std::move(defs);
    return d;
  }

  void remove_runner(std::int64_t pt) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, runners_.size() - 1);
    auto& r = runners_[pick(rng_)];
    r.status = "REMOVED";
    r.removal_date = iso_time(pt);
    r.adjustment_factor = round2(100.0 / tick_price(r.tick));
  }

  std::int64_t settle() {
    double total = 0;
    for (const auto& r : runners_)
      if (r.status == "ACTIVE") total += 1.0 / tick_price(r.tick);
    double u = uniform_() * total;
    std::int64_t winner = 0;
    for (const auto& r : runners_) {
      if (r.status != "ACTIVE") continue;
      winner = r.id;
      u -= 1.0 / tick_price(r.tick);
      if (u <= 0) break;
    }
    for (auto& r : runners_)
      if (r.status == "ACTIVE") r.status = r.id == winner ? "WINNER" : "LOSER";
    return winner;
  }

  std::vector<RunnerChangeMsg> runner_changes(bool everyone) {
    std::vector<std::size_t> active;
    for (std::size_t r = 0; r < runners_.size(); ++r)
      if (runners_[r].status == "ACTIVE") active.push_back(r);

    std::vector<std::size_t> chosen;
    if (everyone) {
      chosen = active;
    } else {
      const double u = uniform_();
      const std::size_t k = std::min<std::size_t>(active.size(), u < 0.6 ? 1 : (u < 0.9 ? 2 : 3));
      for (std::size_t i = 0; i < k; ++i) {
        boost::random::uniform_int_distribution<std::size_t> pick(i, active.size() - 1);
        std::swap(active[i], active[pick(rng_)]);
        chosen.push_back(active[i]);
      }
      std::sort(chosen.begin(), chosen.end());
    }

    std::vector<RunnerChangeMsg> out;
    for (std::size_t r : chosen) out.push_back(trade(runners_[r], everyone));
    return out;
  }

  // GARCH-like volatility in tick units gives clustered price moves.
  int tick_step() {
    const double shock = normal_(rng_);
    var_ = 0.2 + 0.15 * last_shock_ * last_shock_ + 0.8 * var_;
    last_shock_ = std::sqrt(var_) * shock;
    int step = static_cast<int>(std::lround(last_shock_));
    if (step == 0) step = shock < 0 ? -1 : 1;
    return step;
  }

  RunnerChangeMsg trade(Runner& runner, bool opening) {
    const int top = tick_count() - 1;
    if (!opening) {
      int next = runner.tick + tick_step();
      if (next < 0) next = -next;
      if (next > top) next = 2 * top - next;
      next = std::clamp(next, 0, top);
      if (next == runner.tick) next = runner.tick == top ? top - 1 : runner.tick + 1;
      runner.tick = next;
    }
    const double ltp = tick_price(runner.tick);
    const double stake = round2(std::max(0.01, stake_(rng_)));
    runner.tv = round2(runner.tv + stake);
    runner.traded[ltp] = round2(runner.traded[ltp] + stake);

    RunnerChangeMsg rc;
    rc.id = runner.id;
    rc.ltp = ltp;
    rc.tv = runner.tv;
    rc.trd = PriceLadder{{ltp, runner.traded[ltp]}};

    PriceLadder atb;
    if (runner.best_back && *runner.best_back != ltp) atb.push_back({*runner.best_back, 0.0});
    atb.push_back({ltp, round2(5.0 + 50.0 * uniform_())});
    runner.best_back = ltp;
    rc.atb = std::move(atb);

    if (runner.tick < top) {
      const double lay = tick_price(runner.tick + 1);
      PriceLadder atl;
      if (runner.best_lay && *runner.best_lay != lay) atl.push_back({*runner.best_lay, 0.0});
      atl.push_back({lay, round2(5.0 + 50.0 * uniform_())});
      runner.best_lay = lay;
      rc.atl = std::move(atl);
    }
    return rc;
  }

  double uniform_() { return unit_(rng_); }

  const SyntheticStreamSpec& spec_;
  int index_;
  Engine& rng_;
  std::string market_id_, event_id_, market_time_, open_date_;
  std::vector<Runner> runners_;
  std::int64_t version_ = 0;
  double var_ = 1.0;
  double last_shock_ = 0.0;
  boost::random::uniform_01<double> unit_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  boost::random::lognormal_distribution<double> stake_{2.5, 1.0};
};

}  // namespace

std::vector<SyntheticMarketFile> generate_stream(const SyntheticStreamSpec& spec) {
  if (spec.markets < 0) throw DomainError("generate_stream: market count must be non-negative");
  if (spec.runners_min < 3 || spec.runners_max > 21 || spec.runners_min > spec.runners_max)
    throw DomainError("generate_stream: runners per market must lie within [3, 21]");
  if (spec.messages < 10) throw DomainError("generate_stream: at least 10 messages per market");
  if (!(spec.mean_gap_s > 0) || !(spec.sd_gap_s > 0)) throw DomainError("generate_stream: gap moments must be positive");

  Engine rng(spec.seed);
  std::vector<SyntheticMarketFile> files;
  files.reserve(static_cast<std::size_t>(spec.markets));
  for (int m = 0; m < spec.markets; ++m) files.push_back(MarketGenerator(spec, m, rng).run());
  return files;
}

std::string join_stream(const std::vector<SyntheticMarketFile>& files) {
  std::string out;
  for (const auto& f : files) out += f.text;
  return out;
}

void write_stream_tree(const std::vector<SyntheticMarketFile>& files, const std::filesystem::path& dir) {
  for (const auto& f : files) {
    const auto event_dir = dir / f.event_id;
    std::filesystem::create_directories(event_dir);
    const auto path = event_dir / (f.market_id + ".bz2");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    const std::string bytes = compress_bz2(f.text);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
}

}  // namespace bfstats::synth
