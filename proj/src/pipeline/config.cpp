#include "bfstats/pipeline/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "bfstats/csv.hpp"
#include "bfstats/errors.hpp"

namespace bfstats::pipeline {

void RunConfig::validate() const {
  auto fraction = [](double v) { return v > 0.0 && v < 1.0; };
  if (commission && !(*commission >= 0.0 && *commission < 1.0))
    throw DomainError("config: commission must lie in [0, 1)");
  if (!(default_commission >= 0.0 && default_commission < 1.0))
    throw DomainError("config: default_commission must lie in [0, 1)");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("config: scale must be positive and finite");
  if (k_fractions.empty()) throw DomainError("config: k_fractions must not be empty");
  for (double k : k_fractions)
    if (!fraction(k)) throw DomainError("config: every k fraction must lie in (0, 1)");
  if (max_lag && *max_lag < 5) throw DomainError("config: max_lag must be at least 5");
  if (!fraction(ks_level)) throw DomainError("config: ks_level must lie in (0, 1)");
  if (log_level != "quiet" && log_level != "info" && log_level != "debug")
    throw DomainError("config: log_level must be quiet, info or debug");
  if (threads < 0) throw DomainError("config: threads must be non-negative");
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

const char* flag(bool b) { return b ? "true" : "false"; }

std::map<std::string, bool EstimatorToggles::*> toggle_fields() {
  return {{"describe", &EstimatorToggles::describe}, {"hill", &EstimatorToggles::hill},
          {"gengauss", &EstimatorToggles::gengauss}, {"ks", &EstimatorToggles::ks},
          {"adf", &EstimatorToggles::adf},           {"kpss", &EstimatorToggles::kpss},
          {"acf", &EstimatorToggles::acf},           {"powerlaw", &EstimatorToggles::powerlaw},
          {"hurst", &EstimatorToggles::hurst}};
}

double to_double(const std::string& key, const std::string& v) {
  double out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw ParseError("config: " + key + ": not a number: " + v);
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw ParseError("config: " + key + ": not an integer: " + v);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("config: " + key + ": not a boolean: " + v);
}

const std::string& single(const CLI::ConfigItem& item) {
  if (item.inputs.size() != 1) throw ParseError("config: " + item.fullname() + " expects one value");
  return item.inputs.front();
}

}  // namespace

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  out << "input = " << quoted(c.input.string()) << '\n';
  out << "output = " << quoted(c.output.string()) << '\n';
  if (c.commission) out << "commission = " << csv::format_double(*c.commission) << '\n';
  out << "default_commission = " << csv::format_double(c.default_commission) << '\n';
  out << "scale = " << csv::format_double(c.scale) << '\n';
  out << "k_fractions = [";
  for (std::size_t i = 0; i < c.k_fractions.size(); ++i)
    out << (i ? ", " : "") << csv::format_double(c.k_fractions[i]);
  out << "]\n";
  if (c.max_lag) out << "max_lag = " << *c.max_lag << '\n';
  out << "ks_level = " << csv::format_double(c.ks_level) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "log_level = " << quoted(c.log_level) << '\n';
  if (!c.sample_markets.empty()) {
    out << "sample_markets = [";
    for (std::size_t i = 0; i < c.sample_markets.size(); ++i) out << (i ? ", " : "") << quoted(c.sample_markets[i]);
    out << "]\n";
  }
  out << "threads = " << c.threads << '\n';
  out << "\n[estimators]\n";
  for (const auto& [name, field] : toggle_fields()) out << name << " = " << flag(c.toggles.*field) << '\n';
  return out.str();
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  CLI::ConfigTOML reader;
  std::vector<CLI::ConfigItem> items;
  try {
    items = reader.from_config(in);
  } catch (const CLI::Error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  RunConfig c;
  const auto toggles = toggle_fields();
  for (const auto& item : items) {
    // The reader emits section open/close markers ("++"/"--") as items.
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    if (item.parents.size() == 1 && item.parents.front() == "estimators") {
      auto it = toggles.find(item.name);
      if (it == toggles.end()) throw ParseError("config: unknown estimator toggle " + item.name);
      c.toggles.*(it->second) = to_bool(key, single(item));
    } else if (!item.parents.empty()) {
      throw ParseError("config: unknown section in " + key);
    } else if (key == "input") {
      c.input = single(item);
    } else if (key == "output") {
      c.output = single(item);
    } else if (key == "commission") {
      c.commission = to_double(key, single(item));
    } else if (key == "default_commission") {
      c.default_commission = to_double(key, single(item));
    } else if (key == "scale") {
      c.scale = to_double(key, single(item));
    } else if (key == "k_fractions") {
      c.k_fractions.clear();
      for (const auto& v : item.inputs) c.k_fractions.push_back(to_double(key, v));
    } else if (key == "max_lag") {
      c.max_lag = to_int<int>(key, single(item));
    } else if (key == "ks_level") {
      c.ks_level = to_double(key, single(item));
    } else if (key == "seed") {
      c.seed = to_int<std::uint64_t>(key, single(item));
    } else if (key == "log_level") {
      c.log_level = single(item);
    } else if (key == "sample_markets") {
      c.sample_markets = item.inputs;
    } else if (key == "threads") {
      c.threads = to_int<int>(key, single(item));
    } else {
      throw ParseError("config: unknown key " + key);
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write config");
  out << to_config_text(config);
}

}  // namespace bfstats::pipeline
