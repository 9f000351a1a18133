#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "bfstats/csv.hpp"
#include "bfstats/pipeline/pipeline.hpp"
#include "bfstats/pipeline/report.hpp"
#include "bfstats/synth/series.hpp"
#include "bfstats/synth/stream.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace bfstats;
using pipeline::RunConfig;

namespace {

// Flag values that override the config file when given.
struct Overrides {
  std::string config_path;
  std::string input;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> commission;
  std::optional<double> scale;
  std::optional<int> max_lag;
  std::vector<double> k_fractions;
  std::optional<double> ks_level;
  std::optional<int> threads;
  std::string log_level;
  std::vector<std::string> disable;
  std::vector<std::string> sample_markets;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("input", o.input, "Archive (.tar.bz2), directory tree, or .bz2 market file");
  cmd->add_option("--config", o.config_path, "Key-value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Seed recorded with the run");
  cmd->add_option("--commission", o.commission, "Commission fraction overriding marketBaseRate");
  cmd->add_option("--scale", o.scale, "Factor applied to log returns before analysis");
  cmd->add_option("--max-lag", o.max_lag, "ACF / power-law lag ceiling");
  cmd->add_option("--k-fractions", o.k_fractions, "Hill k fractions")->delimiter(',');
  cmd->add_option("--ks-level", o.ks_level, "KS significance level");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--log-level", o.log_level, "quiet, info or debug");
  cmd->add_option("--disable", o.disable, "Estimators to skip (describe,hill,gengauss,ks,adf,kpss,acf,powerlaw,hurst)")
      ->delimiter(',');
  cmd->add_option("--sample-markets", o.sample_markets, "Market ids for the ACF figures")->delimiter(',');
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : pipeline::load_config(o.config_path);
  if (!o.input.empty()) c.input = o.input;
  if (!o.out.empty()) c.output = o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.commission) c.commission = *o.commission;
  if (o.scale) c.scale = *o.scale;
  if (o.max_lag) c.max_lag = *o.max_lag;
  if (!o.k_fractions.empty()) c.k_fractions = o.k_fractions;
  if (o.ks_level) c.ks_level = *o.ks_level;
  if (o.threads) c.threads = *o.threads;
  if (!o.log_level.empty()) c.log_level = o.log_level;
  if (!o.sample_markets.empty()) c.sample_markets = o.sample_markets;
  const std::map<std::string, bool pipeline::EstimatorToggles::*> toggles{
      {"describe", &pipeline::EstimatorToggles::describe}, {"hill", &pipeline::EstimatorToggles::hill},
      {"gengauss", &pipeline::EstimatorToggles::gengauss}, {"ks", &pipeline::EstimatorToggles::ks},
      {"adf", &pipeline::EstimatorToggles::adf},           {"kpss", &pipeline::EstimatorToggles::kpss},
      {"acf", &pipeline::EstimatorToggles::acf},           {"powerlaw", &pipeline::EstimatorToggles::powerlaw},
      {"hurst", &pipeline::EstimatorToggles::hurst}};
  for (const auto& name : o.disable) {
    auto it = toggles.find(name);
    if (it == toggles.end()) throw DomainError("unknown estimator: " + name);
    c.toggles.*(it->second) = false;
  }
  if (c.input.empty()) throw DomainError("no input given");
  c.validate();
  return c;
}

std::ostream* logger(const RunConfig& c) { return c.log_level == "quiet" ? nullptr : &std::cerr; }

void print_warnings(const Diagnostics& diag, const RunConfig& c) {
  if (c.log_level != "debug") return;
  for (const auto& w : diag.warnings) std::cerr << "warning " << w.code << " " << w.context << ": " << w.message << '\n';
}

int cmd_ingest(const RunConfig& c) {
  const auto ingest = pipeline::ingest_all(c);
  Diagnostics diag;
  std::size_t unknown = 0;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : ingest.files) {
    diag.merge(f.diagnostics);
    unknown += f.counters.unknown_fields;
    files.push_back({{"name", f.name},
                     {"event_id", f.event_id},
                     {"market_id", f.market_id},
                     {"messages", f.messages.size()},
                     {"warnings", f.diagnostics.warnings.size()}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& e : ingest.failures) failures.push_back({{"market_id", e.market_id}, {"message", e.message}});
  print_warnings(diag, c);
  const nlohmann::json summary{{"files", files},
                               {"messages", ingest.message_count()},
                               {"warnings", diag.warnings.size()},
                               {"unknown_fields", unknown},
                               {"failures", failures},
                               {"input_hash", ingest.input_hash}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_build(const RunConfig& c, bool with_returns) {
  const auto ingest = pipeline::ingest_all(c);
  Diagnostics diag;
  const auto data = pipeline::build_datasets(ingest, diag);
  auto files = pipeline::write_datasets(data, c.output);
  if (with_returns) {
    const auto ret = pipeline::compute_returns(data, c, diag);
    for (auto& p : pipeline::write_returns(ret, data, c.output)) files.push_back(std::move(p));
  }
  print_warnings(diag, c);
  if (auto* log = logger(c)) {
    *log << files.size() << " files written under " << c.output.string() << ", " << diag.warnings.size()
         << " warnings\n";
  }
  return 0;
}

int cmd_analyze(const RunConfig& c, bool full) {
  if (full) {
    const auto result = pipeline::run_pipeline(c, logger(c));
    print_warnings(result.diagnostics, c);
    return 0;
  }
  const auto ingest = pipeline::ingest_all(c);
  Diagnostics diag;
  const auto data = pipeline::build_datasets(ingest, diag);
  const auto ret = pipeline::compute_returns(data, c, diag);
  const auto report = pipeline::analyze(ingest, data, ret, c, diag);
  fs::create_directories(c.output);
  std::ofstream(c.output / "report.json", std::ios::binary) << pipeline::dump_report(report);
  print_warnings(diag, c);
  if (auto* log = logger(c)) *log << "report written to " << (c.output / "report.json").string() << '\n';
  return 0;
}

struct SeriesOptions {
  std::string family = "gaussian";
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> params;
  std::string out;
};

int cmd_synth_series(const SeriesOptions& o) {
  synth::GeneratorSpec spec;
  spec.family = synth::family_from_string(o.family);
  spec.n = o.n;
  spec.seed = o.seed;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("parameter must be name=value: " + kv);
    spec.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  const auto series = synth::generate_series(spec);
  csv::Table t{{"index", "value"}, {}};
  for (Eigen::Index i = 0; i < series.size(); ++i)
    t.rows.push_back({std::to_string(i), csv::format_double(series.values(i))});
  if (o.out.empty())
    std::cout << csv::to_string(t);
  else
    csv::write(o.out, t);
  return 0;
}

int cmd_synth_stream(const synth::SyntheticStreamSpec& spec, const std::string& out) {
  const auto files = synth::generate_stream(spec);
  if (out.empty() || out == "-") {
    std::cout << synth::join_stream(files);
  } else {
    synth::write_stream_tree(files, out);
    std::cerr << files.size() << " market files written under " << out << '\n';
  }
  return 0;
}

void fail(const std::string& code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Betfair stream parser and stylized-facts analysis"};
  app.require_subcommand(1);

  Overrides run;
  auto* ingest = app.add_subcommand("ingest", "Decode market files and print a summary");
  auto* build = app.add_subcommand("build", "Write runner-change, definition and winner CSVs");
  auto* ret = app.add_subcommand("returns", "Also write settlement and log-return files");
  auto* analyze = app.add_subcommand("analyze", "Run the estimator battery and write report.json");
  auto* report = app.add_subcommand("report", "Full pipeline: datasets, returns, report, tables and plot data");
  for (auto* cmd : {ingest, build, ret, analyze, report}) add_run_options(cmd, run);

  auto* synth_cmd = app.add_subcommand("synth", "Synthetic data");
  synth_cmd->require_subcommand(1);
  SeriesOptions series;
  auto* series_cmd = synth_cmd->add_subcommand("series", "Seeded return series as CSV");
  series_cmd->add_option("--family", series.family,
                         "gaussian, laplace, generalized_gaussian, pareto, student_t, ar1, random_walk, garch11");
  series_cmd->add_option("--n", series.n, "Length");
  series_cmd->add_option("--seed", series.seed, "Seed");
  series_cmd->add_option("--param", series.params, "Family parameter name=value (repeatable)");
  series_cmd->add_option("--out", series.out, "CSV path (default stdout)");

  synth::SyntheticStreamSpec stream;
  std::string stream_out;
  auto* stream_cmd = synth_cmd->add_subcommand("stream", "Seeded exchange message stream");
  stream_cmd->add_option("--markets", stream.markets, "Market count");
  stream_cmd->add_option("--runners-min", stream.runners_min, "Fewest runners per market");
  stream_cmd->add_option("--runners-max", stream.runners_max, "Most runners per market");
  stream_cmd->add_option("--messages", stream.messages, "Messages per market");
  stream_cmd->add_option("--markets-per-event", stream.markets_per_event, "Markets sharing one event id");
  stream_cmd->add_option("--seed", stream.seed, "Seed");
  stream_cmd->add_option("--out", stream_out, "Directory for <event>/<market>.bz2 files (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (series_cmd->parsed()) return cmd_synth_series(series);
    if (stream_cmd->parsed()) return cmd_synth_stream(stream, stream_out);
    const RunConfig config = resolve(run);
    if (ingest->parsed()) return cmd_ingest(config);
    if (build->parsed()) return cmd_build(config, false);
    if (ret->parsed()) return cmd_build(config, true);
    if (analyze->parsed()) return cmd_analyze(config, false);
    if (report->parsed()) return cmd_analyze(config, true);
  } catch (const pipeline::PipelineError& e) {
    fail(e.code(), e.what());
    return 2;
  } catch (const std::exception& e) {
    fail("failed", e.what());
    return 1;
  }
  return 0;
}
