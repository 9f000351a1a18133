#include "bfstats/pipeline/report.hpp"

#include <fstream>

#include "bfstats/csv.hpp"

namespace bfstats::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const stats::StatTestResult& r) {
  json j{{"test", r.test},       {"statistic", r.statistic}, {"critical_values", r.critical_values},
         {"p_value", r.p_value}, {"level", r.level},         {"reject", r.reject},
         {"nobs", r.nobs}};
  if (r.lags) j["lags"] = *r.lags;
  return j;
}

json to_json(const stats::DescriptiveStats<double>& d) {
  return {{"n", d.n},
          {"mean", d.mean},
          {"std", d.std},
          {"skewness", d.skewness},
          {"kurtosis", d.kurtosis},
          {"cv", d.cv}};
}

json to_json(const stats::HillCurve<double>& curve) {
  json rows = json::array();
  for (const auto& p : curve) {
    json row{{"k_fraction", p.k_fraction}, {"k_count", p.k_count}};
    if (p.estimate) row["hill"] = *p.estimate;
    if (p.tail_index) row["tail_index"] = *p.tail_index;
    if (p.error) row["error"] = *p.error;
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const stats::GGFit<double>& fit) {
  return {{"mu", fit.mu},
          {"scale", fit.scale},
          {"beta", fit.beta},
          {"sse", fit.sse},
          {"method", stats::to_string(fit.method)}};
}

json to_json(const stats::PowerLawFit<double>& fit) {
  return {{"alpha", fit.alpha},     {"slope", fit.slope},     {"intercept", fit.intercept},
          {"r2", fit.r2},           {"lag_min", fit.lag_min}, {"lag_max", fit.lag_max},
          {"used", fit.used},       {"excluded", fit.excluded}};
}

json to_json(const stats::HurstResult<double>& h) {
  return {{"h", h.h},
          {"raw_slope", h.raw_slope},
          {"r2", h.r2},
          {"windows", h.windows},
          {"rescaled_range", h.rescaled_range}};
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

namespace {

std::string num(const json& j) {
  if (j.is_null()) return "";
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  if (j.is_number()) return csv::format_double(j.get<double>());
  return j.get<std::string>();
}

std::string field(const json& obj, const char* key) { return obj.contains(key) ? num(obj.at(key)) : ""; }

void write_with_comment(const fs::path& path, const std::string& comment, const csv::Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << "# " << comment << '\n' << csv::to_string(table);
}

void describe_row(csv::Table& t, const std::string& scope, const std::string& sign, const json& d) {
  t.rows.push_back({scope, sign, field(d, "n"), field(d, "mean"), field(d, "std"), field(d, "skewness"),
                    field(d, "kurtosis"), field(d, "cv")});
}

}  // namespace

std::vector<fs::path> write_report_tables(const json& report, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  // Tables of disabled estimators have no rows and are not written.
  auto emit = [&](const std::string& name, const csv::Table& t) {
    if (t.rows.empty()) return;
    written.push_back(dir / name);
    csv::write(written.back(), t);
  };
  const json& pooled = report.at("pooled");

  csv::Table descriptive{{"scope", "subset", "n", "mean", "std", "skewness", "kurtosis", "cv"}, {}};
  csv::Table posneg = descriptive;
  csv::Table ks{{"scope", "statistic", "critical_value", "level", "p_value", "rejected", "n_positive", "n_negative"}, {}};
  for (const auto& [scope, s] : pooled.items()) {
    if (s.contains("describe")) describe_row(descriptive, scope, "all", s["describe"]);
    if (s.contains("positive_negative")) {
      const auto& pn = s["positive_negative"];
      if (pn.contains("positive")) describe_row(posneg, scope, "positive", pn["positive"]);
      if (pn.contains("negative_magnitude")) describe_row(posneg, scope, "negative_magnitude", pn["negative_magnitude"]);
    }
    if (s.contains("ks")) {
      const auto& k = s["ks"];
      const std::string key = stats::level_key(k["level"].get<double>());
      ks.rows.push_back({scope, num(k["statistic"]), num(k["critical_values"].value(key, json())), num(k["level"]),
                         num(k["p_value"]), num(k["reject"]), field(k, "n_a"), field(k, "n_b")});
    }
  }
  emit("table_descriptive.csv", descriptive);
  emit("table_positive_negative.csv", posneg);
  emit("table_ks.csv", ks);

  csv::Table hill{{"scope", "k_fraction", "k_count", "hill", "tail_index", "error"}, {}};
  for (const auto& [scope, s] : pooled.items())
    if (s.contains("hill"))
      for (const auto& p : s["hill"])
        hill.rows.push_back({scope, field(p, "k_fraction"), field(p, "k_count"), field(p, "hill"),
                             field(p, "tail_index"), field(p, "error")});
  emit("table_hill.csv", hill);

  csv::Table gg{{"scope", "method", "mu", "scale", "beta", "sse"}, {}};
  csv::Table hurst{{"scope", "h", "raw_slope", "r2", "windows"}, {}};
  for (const auto& [scope, s] : pooled.items()) {
    if (s.contains("gengauss"))
      for (const auto& [method, f] : s["gengauss"].items())
        gg.rows.push_back({scope, method, field(f, "mu"), field(f, "scale"), field(f, "beta"), field(f, "sse")});
    if (s.contains("hurst"))
      hurst.rows.push_back({scope, field(s["hurst"], "h"), field(s["hurst"], "raw_slope"), field(s["hurst"], "r2"),
                            std::to_string(s["hurst"]["windows"].size())});
  }
  emit("table_gengauss.csv", gg);
  emit("table_hurst.csv", hurst);

  // One stationarity table per (test, series), all markets.
  for (const char* test : {"kpss", "adf"})
    for (const char* series : {"absolute", "log"}) {
      csv::Table t{{"market_id", "statistic", "critical_value_5", "p_value", "rejected", "lags", "nobs"}, {}};
      for (const auto& m : report.at("markets")) {
        if (!m.contains(test) || !m[test].contains(series)) continue;
        const auto& r = m[test][series];
        t.rows.push_back({m["market_id"].get<std::string>(), num(r["statistic"]),
                          num(r["critical_values"].value("5%", json())), num(r["p_value"]), num(r["reject"]),
                          field(r, "lags"), field(r, "nobs")});
      }
      emit(std::string("table_") + test + "_" + series + ".csv", t);
    }

  csv::Table pl{{"market_id", "alpha", "slope", "intercept", "r2", "lag_min", "lag_max", "used", "excluded"}, {}};
  for (const auto& m : report.at("markets")) {
    if (!m.contains("powerlaw")) continue;
    const auto& f = m["powerlaw"];
    pl.rows.push_back({m["market_id"].get<std::string>(), field(f, "alpha"), field(f, "slope"), field(f, "intercept"),
                       field(f, "r2"), field(f, "lag_min"), field(f, "lag_max"), field(f, "used"),
                       field(f, "excluded")});
  }
  emit("table_powerlaw_markets.csv", pl);
  if (report.contains("powerlaw_summary")) {
    const auto& s = report["powerlaw_summary"];
    emit("table_powerlaw_summary.csv", csv::Table{{"n", "mean", "std", "max", "min"},
                                                  {{field(s, "n"), field(s, "mean"), field(s, "std"),
                                                    field(s, "max"), field(s, "min")}}});
  }
  return written;
}

std::vector<fs::path> emit_plot_data(const json& report, const returns::ReturnSeries& pooled,
                                     const std::map<std::string, returns::ReturnSeries>& market_log,
                                     const std::vector<std::string>& markets, const RunConfig& config,
                                     const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const json& scope = report.at("pooled").at("log_returns");
  const Eigen::VectorXd& x = pooled.values;

  if (x.size() >= 2 && (x.maxCoeff() > x.minCoeff())) {
    const auto hist = stats::density_histogram(x);
    csv::Table t{{"bin_center", "empirical_density", "fitted_density"}, {}};
    const bool fitted = scope.contains("gengauss");
    double mu = 0, scale = 1, beta = 2;
    if (fitted) {
      const auto& f = scope["gengauss"]["sse"];
      mu = f["mu"].get<double>();
      scale = f["scale"].get<double>();
      beta = f["beta"].get<double>();
    }
    for (Eigen::Index b = 0; b < hist.centers.size(); ++b)
      t.rows.push_back({csv::format_double(hist.centers(b)), csv::format_double(hist.density(b)),
                        fitted ? csv::format_double(stats::gg_pdf(hist.centers(b), mu, scale, beta)) : ""});
    written.push_back(dir / "fig1_pdf.csv");
    write_with_comment(written.back(),
                       "bin_center: histogram bin midpoint of pooled log returns; empirical_density: bin count / "
                       "(n * width); fitted_density: generalized Gaussian SSE fit at bin_center",
                       t);
  }

  // Positive returns and negative-return magnitudes on shared bins.
  std::vector<double> pos, neg;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) > 0) pos.push_back(x(i));
    if (x(i) < 0) neg.push_back(-x(i));
  }
  if (!pos.empty() && !neg.empty()) {
    std::vector<double> both = pos;
    both.insert(both.end(), neg.begin(), neg.end());
    const Eigen::Map<const Eigen::VectorXd> all(both.data(), static_cast<Eigen::Index>(both.size()));
    if (all.maxCoeff() > all.minCoeff()) {
      const auto hist = stats::density_histogram(all);
      const double lo = hist.centers(0) - hist.width / 2;
      const Eigen::Index bins = hist.centers.size();
      auto density = [&](const std::vector<double>& v) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(bins);
        for (double y : v) d(std::min<Eigen::Index>(static_cast<Eigen::Index>((y - lo) / hist.width), bins - 1)) += 1;
        return Eigen::VectorXd(d / (static_cast<double>(v.size()) * hist.width));
      };
      const Eigen::VectorXd dp = density(pos), dn = density(neg);
      csv::Table t{{"bin_center", "density_positive", "density_negative"}, {}};
      for (Eigen::Index b = 0; b < bins; ++b)
        t.rows.push_back({csv::format_double(hist.centers(b)), csv::format_double(dp(b)), csv::format_double(dn(b))});
      written.push_back(dir / "fig2_pdf_posneg.csv");
      write_with_comment(written.back(),
                         "bin_center: magnitude bin midpoint; density_positive: density of positive log returns; "
                         "density_negative: density of |negative log returns|",
                         t);
    }
  }

  for (const auto& id : markets) {
    const auto it = market_log.find(id);
    if (it == market_log.end() || it->second.size() < 12) continue;
    const Eigen::VectorXd& r = it->second.values;
    const Eigen::Index lag = config.max_lag ? std::min<Eigen::Index>(*config.max_lag, (r.size() - 1) / 2)
                                            : stats::default_powerlaw_lag(r.size());
    if (lag < 1) continue;
    try {
      const auto acf_log = stats::acf(r, lag);
      csv::Table t3{{"lag", "rho", "band_lower", "band_upper"}, {}};
      for (Eigen::Index k = 0; k <= lag; ++k)
        t3.rows.push_back({std::to_string(k), csv::format_double(acf_log.rho(k)), csv::format_double(-acf_log.band),
                           csv::format_double(acf_log.band)});
      written.push_back(dir / ("fig3_acf_" + id + ".csv"));
      write_with_comment(written.back(),
                         "lag: tick lag; rho: sample autocorrelation of log returns; band_lower/band_upper: "
                         "-/+1.96/sqrt(n) white-noise band",
                         t3);

      std::optional<json> fit;
      for (const auto& m : report.at("markets"))
        if (m["market_id"] == id && m.contains("powerlaw")) fit = m["powerlaw"];
      const auto acf_abs = stats::acf(Eigen::VectorXd(r.cwiseAbs()), lag);
      csv::Table t4{{"lag", "rho_abs", "fitted"}, {}};
      for (Eigen::Index k = 1; k <= lag; ++k) {
        std::string fitted;
        if (fit) {
          stats::PowerLawFit<double> f;
          f.slope = (*fit)["slope"].get<double>();
          f.intercept = (*fit)["intercept"].get<double>();
          fitted = csv::format_double(f.fitted(static_cast<double>(k)));
        }
        t4.rows.push_back({std::to_string(k), csv::format_double(acf_abs.rho(k)), fitted});
      }
      written.push_back(dir / ("fig4_acf_powerlaw_" + id + ".csv"));
      write_with_comment(written.back(),
                         "lag: tick lag; rho_abs: autocorrelation of absolute log returns; fitted: "
                         "exp(intercept) * lag^slope from the power-law fit",
                         t4);
    } catch (const std::exception&) {
      // Constant series: no ACF to plot; the report already lists the error.
    }
  }
  return written;
}

}  // namespace bfstats::pipeline
