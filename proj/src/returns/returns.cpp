#include "bfstats/returns/returns.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bfstats/errors.hpp"

namespace bfstats::returns {

const char* to_string(ReturnKind kind) {
  switch (kind) {
    case ReturnKind::log: return "log";
    case ReturnKind::simple: return "simple";
    case ReturnKind::absolute: return "absolute";
    case ReturnKind::squared: return "squared";
    case ReturnKind::raw: return "raw";
  }
  return "raw";
}

namespace {

template <typename Step>
ReturnSeries difference(std::span<const PricePoint> prices, std::string market_id, ReturnKind kind, Step step) {
  std::vector<std::int64_t> t;
  std::vector<double> v;
  std::optional<double> prev;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!prices[i].price) continue;
    const double p = *prices[i].price;
    if (!(p > 0))
      throw DomainError("non-positive price " + std::to_string(p) + " at tick " + std::to_string(i) + " (t=" +
                        std::to_string(prices[i].t) + ")");
    if (prev) {
      t.push_back(prices[i].t);
      v.push_back(step(*prev, p));
    }
    prev = p;
  }
  ReturnSeries s;
  s.market_id = std::move(market_id);
  s.t = std::move(t);
  s.values = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  s.kind = kind;
  return s;
}

}  // namespace

ReturnSeries log_returns(std::span<const PricePoint> prices, std::string market_id) {
  return difference(prices, std::move(market_id), ReturnKind::log,
                    [](double p0, double p1) { return std::log(p1) - std::log(p0); });
}

ReturnSeries simple_returns(std::span<const PricePoint> prices, std::string market_id) {
  return difference(prices, std::move(market_id), ReturnKind::simple,
                    [](double p0, double p1) { return (p1 - p0) / p0; });
}

ReturnSeries convert(const ReturnSeries& series, Conversion direction) {
  ReturnSeries out = series;
  if (direction == Conversion::log_to_simple) {
    if (series.kind != ReturnKind::log) throw DomainError("convert: expected a log-return series");
    out.values = series.values.array().exp() - 1.0;
    out.kind = ReturnKind::simple;
  } else {
    if (series.kind != ReturnKind::simple) throw DomainError("convert: expected a simple-return series");
    if ((series.values.array() <= -1.0).any()) throw DomainError("convert: simple return <= -1 has no log return");
    out.values = series.values.array().log1p();
    out.kind = ReturnKind::log;
  }
  return out;
}

ReturnSeries transform(const ReturnSeries& series, ReturnKind kind) {
  ReturnSeries out = series;
  if (kind == ReturnKind::absolute)
    out.values = series.values.cwiseAbs();
  else if (kind == ReturnKind::squared)
    out.values = series.values.array().square();
  else
    throw DomainError("transform: kind must be absolute or squared");
  out.kind = kind;
  return out;
}

ReturnSeries scaled(const ReturnSeries& series, double factor) {
  ReturnSeries out = series;
  out.values *= factor;
  out.scale = series.scale * factor;
  return out;
}

std::map<SelectionKey, std::vector<PricePoint>> ltp_paths(std::span<const market::RunnerChangeRecord> records) {
  std::map<SelectionKey, std::vector<PricePoint>> paths;
  for (const auto& r : records) {
    if (!r.ltp) continue;
    auto& path = paths[{r.market_id, r.id}];
    if (!path.empty() && path.back().price == r.ltp) continue;
    path.push_back({r.pt, r.ltp});
  }
  return paths;
}

std::map<std::string, ReturnSeries> market_log_returns(std::span<const market::RunnerChangeRecord> records) {
  std::map<std::string, std::vector<ReturnSeries>> per_market;
  for (const auto& [key, path] : ltp_paths(records)) {
    auto s = log_returns(path, key.first);
    if (s.size() > 0) per_market[key.first].push_back(std::move(s));
  }
  std::map<std::string, ReturnSeries> out;
  for (auto& [market, parts] : per_market) {
    auto merged = concat_series(parts);
    merged.market_id = market;
    out.emplace(market, std::move(merged));
  }
  return out;
}

ReturnSeries concat_series(std::span<const ReturnSeries> parts) {
  ReturnSeries out;
  out.market_id = "combined";
  if (parts.empty()) return out;
  out.kind = parts.front().kind;
  out.scale = parts.front().scale;

  struct Row {
    std::int64_t t;
    double v;
  };
  std::vector<Row> rows;
  for (const auto& p : parts) {
    if (p.kind != out.kind) throw SchemaError("concat_series: mixed return kinds");
    for (Eigen::Index i = 0; i < p.size(); ++i) rows.push_back({p.t[static_cast<std::size_t>(i)], p.values(i)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
  out.t.resize(rows.size());
  out.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.t[i] = rows[i].t;
    out.values(static_cast<Eigen::Index>(i)) = rows[i].v;
  }
  return out;
}

}  // namespace bfstats::returns
