#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bfstats/pipeline/config.hpp"
#include "bfstats/returns/series.hpp"
#include "bfstats/stats.hpp"
#include "json.hpp"

namespace bfstats::pipeline {

nlohmann::json to_json(const stats::StatTestResult& r);
nlohmann::json to_json(const stats::DescriptiveStats<double>& d);
nlohmann::json to_json(const stats::HillCurve<double>& curve);
nlohmann::json to_json(const stats::GGFit<double>& fit);
nlohmann::json to_json(const stats::PowerLawFit<double>& fit);
nlohmann::json to_json(const stats::HurstResult<double>& h);

/// Pretty-printed report text with a trailing newline.
std::string dump_report(const nlohmann::json& report);

/// CSV mirrors of the report: descriptive, Hill, positive/negative and KS,
/// per-market stationarity (absolute and log returns) and the power-law
/// table with its cross-market summary. Read from the report only.
std::vector<std::filesystem::path> write_report_tables(const nlohmann::json& report, const std::filesystem::path& dir);

/// Figure data: fig1_pdf.csv, fig2_pdf_posneg.csv, fig3_acf_<id>.csv and
/// fig4_acf_powerlaw_<id>.csv. Fitted curves use the report's parameters;
/// the series supply the empirical side. Each file starts with a `#` line
/// describing its columns.
std::vector<std::filesystem::path> emit_plot_data(const nlohmann::json& report, const returns::ReturnSeries& pooled,
                                                  const std::map<std::string, returns::ReturnSeries>& market_log,
                                                  const std::vector<std::string>& markets, const RunConfig& config,
                                                  const std::filesystem::path& dir);

}  // namespace bfstats::pipeline
