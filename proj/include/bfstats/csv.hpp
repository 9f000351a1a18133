#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bfstats::csv {

/// Header plus string cells. Empty cell = absent value.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 quoting: cells containing comma, quote, CR or LF are quoted.
std::string quote(const std::string& cell);
std::string to_string(const Table& table);
Table parse(const std::string& text);

/// Throws std::runtime_error if the file cannot be written or read.
void write(const std::filesystem::path& path, const Table& table);
Table read(const std::filesystem::path& path);

/// Throws SchemaError unless `table.header` equals `expected`.
void require_header(const Table& table, const std::vector<std::string>& expected, const std::string& what);

std::string format_double(double v);
std::string cell(const std::optional<double>& v);
std::string cell(const std::optional<bool>& v);
std::string cell(const std::optional<std::string>& v);
std::string cell(const std::optional<std::int64_t>& v);
std::string cell(bool v);

std::optional<double> opt_double(const std::string& s);
std::optional<bool> opt_bool(const std::string& s);
std::optional<std::string> opt_string(const std::string& s);
std::optional<std::int64_t> opt_int(const std::string& s);

}  // namespace bfstats::csv
