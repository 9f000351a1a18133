#include "bfstats/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bfstats/errors.hpp"

namespace bfstats::csv {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += quote(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string to_string(const Table& table) {
  std::string out;
  append_row(out, table.header);
  for (const auto& row : table.rows) append_row(out, row);
  return out;
}

Table parse(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty()) throw ParseError("csv: stray quote inside unquoted cell", line);
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(cell));
        cell.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(cell));
        cell.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        ++line;
        break;
      default:
        cell += c;
        any = true;
    }
  }
  if (quoted) throw ParseError("csv: unterminated quoted cell", line);
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  Table t;
  if (rows.empty()) return t;
  t.header = std::move(rows.front());
  t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    if (t.rows[r].size() != t.header.size())
      throw ParseError("csv: row has " + std::to_string(t.rows[r].size()) + " cells, header has " +
                           std::to_string(t.header.size()),
                       r + 2);
  return t;
}

void write(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << to_string(table);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void require_header(const Table& table, const std::vector<std::string>& expected, const std::string& what) {
  if (table.header != expected) throw SchemaError(what + ": unexpected CSV header");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string cell(const std::optional<bool>& v) { return v ? cell(*v) : std::string(); }
std::string cell(const std::optional<std::string>& v) { return v.value_or(std::string()); }
std::string cell(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); }
std::string cell(bool v) { return v ? "true" : "false"; }

std::optional<double> opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw SchemaError("csv: not a number: " + s);
  return v;
}

std::optional<bool> opt_bool(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  throw SchemaError("csv: not a boolean: " + s);
}

std::optional<std::string> opt_string(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

std::optional<std::int64_t> opt_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw SchemaError("csv: not an integer: " + s);
  return v;
}

}  // namespace bfstats::csv
