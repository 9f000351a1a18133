#include "bfstats/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "bfstats/market/export.hpp"
#include "bfstats/pipeline/report.hpp"
#include "bfstats/returns/returns.hpp"
#include "bfstats/stats.hpp"

namespace bfstats::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

// Reference markets for the per-market figures.
const std::vector<std::string> kReferenceMarkets{"1.122946937", "1.122946927", "1.122946942"};

unsigned worker_count(const RunConfig& config, std::size_t jobs) {
  unsigned n = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(i) for i in [0, jobs); results must be written by index so the
// outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t jobs, unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::string hex() const {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash_;
    return out.str();
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::string hash_input(const fs::path& input) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    for (const auto& e : fs::recursive_directory_iterator(input))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  Fnv1a h;
  std::vector<char> buf(1 << 16);
  for (const auto& f : files) {
    h.update(fs::relative(f, fs::is_directory(input) ? input : input.parent_path()).generic_string());
    std::ifstream in(f, std::ios::binary);
    while (in) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
    }
  }
  return h.hex();
}

void log_line(std::ostream* log, const std::string& text) {
  if (log) *log << text << '\n';
}

void add_error(nlohmann::json& errors, const std::string& market, const std::string& stage, const std::string& msg) {
  errors.push_back({{"market_id", market}, {"stage", stage}, {"message", msg}});
}

// Runs one estimator; failures land in the error list instead of aborting.
template <typename Fn>
void guarded(nlohmann::json& errors, const std::string& scope, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    add_error(errors, scope, name, e.what());
  }
}

Eigen::VectorXd select(const Eigen::VectorXd& x, bool positive) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (positive ? x(i) > 0 : x(i) < 0) out.push_back(std::abs(x(i)));
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

// Unconditional-distribution battery shared by both pooled scopes.
nlohmann::json distribution_scope(const Eigen::VectorXd& x, const RunConfig& config, const std::string& label,
                                  const std::string& series, nlohmann::json& errors, bool tail_and_shape) {
  const auto& on = config.toggles;
  nlohmann::json scope;
  scope["series"] = series;
  scope["n"] = x.size();
  if (on.describe) {
    guarded(errors, label, "describe", [&] { scope["describe"] = to_json(stats::describe(x)); });
    const Eigen::VectorXd pos = select(x, true), neg = select(x, false);
    nlohmann::json pn;
    pn["zero_count"] = x.size() - pos.size() - neg.size();
    guarded(errors, label, "describe_positive", [&] { pn["positive"] = to_json(stats::describe(pos)); });
    guarded(errors, label, "describe_negative", [&] { pn["negative_magnitude"] = to_json(stats::describe(neg)); });
    scope["positive_negative"] = pn;
  }
  if (on.ks)
    guarded(errors, label, "ks", [&] {
      const Eigen::VectorXd pos = select(x, true), neg = select(x, false);
      auto ks = to_json(stats::ks_two_sample(pos, neg, config.ks_level));
      ks["n_a"] = pos.size();
      ks["n_b"] = neg.size();
      ks["samples"] = "positive vs |negative|";
      scope["ks"] = ks;
    });
  if (!tail_and_shape) return scope;
  if (on.hill)
    guarded(errors, label, "hill", [&] {
      scope["hill"] = to_json(stats::hill_curve(stats::tail_magnitudes(x), config.k_fractions));
    });
  if (on.gengauss)
    guarded(errors, label, "gengauss", [&] {
      scope["gengauss"] = {{"sse", to_json(stats::fit_gg(x, stats::GGMethod::sse))},
                           {"mle", to_json(stats::fit_gg(x, stats::GGMethod::mle))}};
    });
  if (on.hurst) guarded(errors, label, "hurst", [&] { scope["hurst"] = to_json(stats::hurst_rs(x)); });
  return scope;
}

struct MarketAnalysis {
  nlohmann::json row;
  nlohmann::json errors = nlohmann::json::array();
};

MarketAnalysis analyze_market(const std::string& market, const std::string& event,
                              const returns::ReturnSeries* series, const RunConfig& config) {
  const auto& on = config.toggles;
  MarketAnalysis out;
  out.row["market_id"] = market;
  out.row["event_id"] = event;
  out.row["n_returns"] = series ? series->size() : 0;
  if (!series || series->size() < 2) {
    add_error(out.errors, market, "returns", "fewer than two log returns");
    return out;
  }
  const Eigen::VectorXd& log_r = series->values;
  const Eigen::VectorXd abs_r = log_r.cwiseAbs();

  if (on.adf) {
    nlohmann::json adf;
    guarded(out.errors, market, "adf_absolute", [&] { adf["absolute"] = to_json(stats::adf(abs_r)); });
    guarded(out.errors, market, "adf_log", [&] { adf["log"] = to_json(stats::adf(log_r)); });
    if (!adf.empty()) out.row["adf"] = adf;
  }
  if (on.kpss) {
    nlohmann::json kpss;
    guarded(out.errors, market, "kpss_absolute", [&] { kpss["absolute"] = to_json(stats::kpss(abs_r)); });
    guarded(out.errors, market, "kpss_log", [&] { kpss["log"] = to_json(stats::kpss(log_r)); });
    if (!kpss.empty()) out.row["kpss"] = kpss;
  }
  if (on.acf || on.powerlaw) {
    const Eigen::Index lag =
        config.max_lag ? std::min<Eigen::Index>(*config.max_lag, (log_r.size() - 1) / 2)
                       : stats::default_powerlaw_lag(log_r.size());
    guarded(out.errors, market, "acf", [&] {
      const auto acf_log = stats::acf(log_r, lag);
      const auto acf_abs = stats::acf(abs_r, lag);
      if (on.acf)
        out.row["acf"] = {{"max_lag", lag},
                          {"band", acf_log.band},
                          {"lag1_log", acf_log.rho(1)},
                          {"lag1_absolute", acf_abs.rho(1)}};
      if (on.powerlaw)
        guarded(out.errors, market, "powerlaw",
                [&] { out.row["powerlaw"] = to_json(stats::fit_powerlaw_acf(acf_abs.rho, lag)); });
    });
  }
  return out;
}

nlohmann::json powerlaw_summary(const nlohmann::json& markets) {
  std::vector<double> alpha;
  for (const auto& m : markets)
    if (m.contains("powerlaw")) alpha.push_back(m["powerlaw"]["alpha"].get<double>());
  nlohmann::json s;
  s["n"] = alpha.size();
  if (alpha.empty()) return s;
  const Eigen::Map<const Eigen::VectorXd> a(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
  const double mean = a.mean();
  s["mean"] = mean;
  s["std"] = alpha.size() > 1 ? std::sqrt((a.array() - mean).square().sum() / static_cast<double>(alpha.size() - 1))
                              : 0.0;
  s["max"] = a.maxCoeff();
  s["min"] = a.minCoeff();
  return s;
}

}  // namespace

std::size_t IngestResult::message_count() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.messages.size();
  return n;
}

IngestResult ingest_all(const RunConfig& config) {
  const auto sources = ingest::open_archive(config.input);
  if (sources.empty()) throw PipelineError("no_markets", "no markets found under " + config.input.string());

  std::vector<std::optional<ingest::MarketFile>> decoded(sources.size());
  std::vector<std::string> failure(sources.size());
  parallel_for(sources.size(), worker_count(config, sources.size()), [&](std::size_t i) {
    try {
      decoded[i] = ingest::read_market_file(sources[i]);
    } catch (const std::exception& e) {
      failure[i] = sources[i].name() + ": " + e.what();
    }
  });

  IngestResult out;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (decoded[i])
      out.files.push_back(std::move(*decoded[i]));
    else
      out.failures.push_back({sources[i].market_id(), "ingest", failure[i]});
  }
  if (out.files.empty()) throw PipelineError("no_markets", "no markets found: every market file failed to decode");
  out.input_hash = hash_input(config.input);
  return out;
}

Datasets build_datasets(const IngestResult& ingest, Diagnostics& diag) {
  Datasets d;
  for (const auto& file : ingest.files) {
    diag.merge(file.diagnostics);
    auto rc = market::build_runner_change_dataset(file.messages, diag, file.event_id);
    d.runner_changes.insert(d.runner_changes.end(), std::make_move_iterator(rc.begin()),
                            std::make_move_iterator(rc.end()));

    auto defs = market::build_definition_datasets(file.messages, file.event_id);
    d.definitions_full.insert(d.definitions_full.end(), defs.full.begin(), defs.full.end());
    d.definitions.insert(d.definitions.end(), defs.condensed.begin(), defs.condensed.end());

    auto history = market::collect_definitions(file.messages);
    auto winners = market::extract_winners(history, diag, file.event_id);
    d.winners.insert(d.winners.end(), winners.begin(), winners.end());
    for (auto& [id, timeline] : history) {
      auto& dst = d.history[id];
      dst.insert(dst.end(), timeline.begin(), timeline.end());
    }

    std::set<std::string> ids;
    for (const auto& msg : file.messages)
      for (const auto& mc : msg.mc) ids.insert(mc.id);
    if (ids.empty() && !file.market_id.empty()) ids.insert(file.market_id);
    for (const auto& id : ids) {
      d.message_counts.try_emplace(id, 0);
      d.market_events.emplace(id, file.event_id);
    }
    for (const auto& msg : file.messages)
      for (const auto& mc : msg.mc) ++d.message_counts[mc.id];
  }
  for (const auto& def : d.definitions) d.market_events[def.id] = def.event_id;
  std::stable_sort(d.runner_changes.begin(), d.runner_changes.end(),
                   [](const auto& a, const auto& b) { return a.pt < b.pt; });
  return d;
}

std::vector<fs::path> write_datasets(const Datasets& data, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  std::map<std::string, std::vector<market::RunnerChangeRecord>> by_event;
  for (const auto& r : data.runner_changes) by_event[r.event_id].push_back(r);
  for (const auto& [event, records] : by_event) {
    written.push_back(dir / ("runner_changes_" + event + ".csv"));
    market::export_csv(records, written.back());
  }
  written.push_back(dir / "market_definitions_full.csv");
  market::export_csv(data.definitions_full, true, written.back());
  written.push_back(dir / "market_definitions.csv");
  market::export_csv(data.definitions, false, written.back());
  written.push_back(dir / "winners.csv");
  market::export_csv(data.winners, written.back());
  return written;
}

ReturnData compute_returns(const Datasets& data, const RunConfig& config, Diagnostics& diag) {
  ReturnData out;
  for (auto& [market, series] : returns::market_log_returns(data.runner_changes))
    out.market_log.emplace(market, config.scale == 1.0 ? series : returns::scaled(series, config.scale));
  std::vector<returns::ReturnSeries> parts;
  for (const auto& [market, series] : out.market_log) parts.push_back(series);
  out.pooled = returns::concat_series(parts);
  out.pooled.kind = returns::ReturnKind::log;
  out.pooled.scale = config.scale;

  const auto policy = returns::commission_from_definitions(data.history, config.default_commission, config.commission);
  out.settlement = returns::settlement_returns(data.runner_changes, data.winners, policy, diag);
  return out;
}

std::vector<fs::path> write_returns(const ReturnData& data, const Datasets& datasets, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  std::set<std::string> events;
  for (const auto& [market, event] : datasets.market_events) events.insert(event);
  std::map<std::string, std::vector<returns::SettlementReturnRecord>> pos, neg;
  for (const auto& r : data.settlement.positive) pos[r.event_id].push_back(r);
  for (const auto& r : data.settlement.negative) neg[r.event_id].push_back(r);
  for (const auto& event : events) {
    written.push_back(dir / ("returns_positive_" + event + ".csv"));
    csv::write(written.back(), returns::to_table(pos[event]));
    written.push_back(dir / ("returns_negative_" + event + ".csv"));
    csv::write(written.back(), returns::to_table(neg[event]));
  }
  const std::vector<std::vector<returns::SettlementReturnRecord>> parts{data.settlement.positive,
                                                                       data.settlement.negative};
  written.push_back(dir / "returns_all.csv");
  csv::write(written.back(), returns::to_table(returns::concat_returns(parts)));

  csv::Table log_table;
  log_table.header = {"t", "marketId", "log_return"};
  std::vector<std::tuple<std::int64_t, std::string, double>> rows;
  for (const auto& [market, series] : data.market_log)
    for (Eigen::Index i = 0; i < series.size(); ++i)
      rows.emplace_back(series.t[static_cast<std::size_t>(i)], market, series.values(i));
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
  for (const auto& [t, market, v] : rows) log_table.rows.push_back({std::to_string(t), market, csv::format_double(v)});
  written.push_back(dir / "log_returns.csv");
  csv::write(written.back(), log_table);
  return written;
}

std::vector<std::string> sample_markets(const Datasets& data, const RunConfig& config) {
  if (!config.sample_markets.empty()) return config.sample_markets;
  if (std::all_of(kReferenceMarkets.begin(), kReferenceMarkets.end(),
                  [&](const auto& id) { return data.message_counts.count(id) > 0; }))
    return kReferenceMarkets;
  std::vector<std::pair<std::string, std::size_t>> counts(data.message_counts.begin(), data.message_counts.end());
  std::stable_sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, counts.size()); ++i) out.push_back(counts[i].first);
  return out;
}

nlohmann::json analyze(const IngestResult& ingest, const Datasets& data, const ReturnData& ret,
                       const RunConfig& config, const Diagnostics& diag) {
  nlohmann::json report;
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& f : ingest.failures) add_error(errors, f.market_id, f.stage, f.message);

  RunConfig recorded = config;
  recorded.input.clear();
  recorded.output.clear();
  recorded.threads = 0;
  recorded.log_level = RunConfig{}.log_level;
  report["provenance"] = {{"input_hash", "fnv1a64:" + ingest.input_hash},
                          {"config", to_config_text(recorded)},
                          {"version", kVersion},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"kurtosis_convention", "pearson (normal = 3)"},
                          {"hill_input", "upper tail of |returns|, standard positive H"}};

  nlohmann::json warnings = nlohmann::json::object();
  for (const auto& w : diag.warnings) warnings[w.code] = warnings.value(w.code, 0) + 1;
  std::size_t unknown = 0;
  for (const auto& f : ingest.files) unknown += f.counters.unknown_fields;
  report["summary"] = {{"market_files", ingest.files.size() + ingest.failures.size()},
                       {"markets", data.message_counts.size()},
                       {"messages", ingest.message_count()},
                       {"unknown_fields", unknown},
                       {"runner_changes", data.runner_changes.size()},
                       {"definitions", data.definitions_full.size()},
                       {"winners", data.winners.size()},
                       {"log_returns", ret.pooled.size()},
                       {"settlement_positive", ret.settlement.positive.size()},
                       {"settlement_negative", ret.settlement.negative.size()},
                       {"settlement_zero", ret.settlement.zero},
                       {"warnings", warnings}};

  report["pooled"]["log_returns"] =
      distribution_scope(ret.pooled.values, config, "pooled_log_returns",
                         std::string("log returns of last traded price, scale ") + csv::format_double(config.scale),
                         errors, true);

  std::vector<double> settled;
  for (const auto* side : {&ret.settlement.positive, &ret.settlement.negative})
    for (const auto& r : *side) settled.push_back(r.net_return);
  const Eigen::VectorXd settled_v = Eigen::Map<const Eigen::VectorXd>(settled.data(), static_cast<Eigen::Index>(settled.size()));
  report["pooled"]["settlement_returns"] = distribution_scope(
      settled_v, config, "pooled_settlement_returns", "net back/lay settlement returns, zeros excluded", errors, false);

  // Per-market time dependence, one row for every market that parsed.
  std::vector<std::string> markets;
  for (const auto& [id, count] : data.message_counts) markets.push_back(id);
  std::vector<MarketAnalysis> results(markets.size());
  parallel_for(markets.size(), worker_count(config, markets.size()), [&](std::size_t i) {
    const auto it = ret.market_log.find(markets[i]);
    const auto ev = data.market_events.find(markets[i]);
    results[i] = analyze_market(markets[i], ev != data.market_events.end() ? ev->second : std::string{},
                                it != ret.market_log.end() ? &it->second : nullptr, config);
  });
  nlohmann::json rows = nlohmann::json::array();
  for (auto& r : results) {
    rows.push_back(std::move(r.row));
    for (auto& e : r.errors) errors.push_back(std::move(e));
  }
  if (config.toggles.powerlaw) report["powerlaw_summary"] = powerlaw_summary(rows);
  report["markets"] = std::move(rows);
  report["sample_markets"] = sample_markets(data, config);
  report["errors"] = std::move(errors);
  return report;
}

PipelineResult run_pipeline(const RunConfig& config, std::ostream* log) {
  config.validate();
  PipelineResult out;
  const fs::path& dir = config.output;
  fs::create_directories(dir);

  log_line(log, "ingest: " + config.input.string());
  const IngestResult ingest = ingest_all(config);
  log_line(log, "ingest: " + std::to_string(ingest.files.size()) + " market files, " +
                    std::to_string(ingest.message_count()) + " messages");

  const Datasets data = build_datasets(ingest, out.diagnostics);
  for (auto& p : write_datasets(data, dir)) out.files.push_back(std::move(p));
  log_line(log, "build: " + std::to_string(data.runner_changes.size()) + " runner changes, " +
                    std::to_string(data.winners.size()) + " winners");

  const ReturnData ret = compute_returns(data, config, out.diagnostics);
  for (auto& p : write_returns(ret, data, dir)) out.files.push_back(std::move(p));
  log_line(log, "returns: " + std::to_string(ret.pooled.size()) + " log returns, " +
                    std::to_string(ret.settlement.positive.size() + ret.settlement.negative.size()) +
                    " settlement returns");

  out.report = analyze(ingest, data, ret, config, out.diagnostics);
  const fs::path report_path = dir / "report.json";
  {
    std::ofstream f(report_path, std::ios::binary);
    if (!f) throw std::runtime_error(report_path.string() + ": cannot write");
    f << dump_report(out.report);
  }
  out.files.push_back(report_path);
  log_line(log, "analyze: " + std::to_string(out.report["markets"].size()) + " markets, " +
                    std::to_string(out.report["errors"].size()) + " estimator errors");

  for (auto& p : write_report_tables(out.report, dir)) out.files.push_back(std::move(p));
  const auto samples = out.report["sample_markets"].get<std::vector<std::string>>();
  for (auto& p : emit_plot_data(out.report, ret.pooled, ret.market_log, samples, config, dir))
    out.files.push_back(std::move(p));
  log_line(log, "report: " + std::to_string(out.files.size()) + " files under " + dir.string());
  return out;
}

}  // namespace bfstats::pipeline
