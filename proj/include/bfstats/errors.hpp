#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfstats {

/// Malformed text input (JSON, CSV, config). Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates the expected record schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compressed container could not be decoded.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& file, std::uint64_t offset, const std::string& detail)
      : std::runtime_error(file + ": " + detail + " at byte offset " + std::to_string(offset)),
        file_(file),
        offset_(offset) {}
  const std::string& file() const noexcept { return file_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::string file_;
  std::uint64_t offset_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Series shorter than an estimator's stated minimum.
class InsufficientData : public std::runtime_error {
 public:
  InsufficientData(const std::string& op, std::size_t have, std::size_t need)
      : std::runtime_error(op + ": insufficient data (n=" + std::to_string(have) + ", need " +
                           std::to_string(need) + ")") {}
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

/// Caller broke an operation's precondition (e.g. wrong market for a state).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Warning {
  std::string code;
  std::string context;  // file or market id
  std::string message;
};

/// Data-quality warnings collected during a run. Never fatal.
struct Diagnostics {
  std::vector<Warning> warnings;

  void warn(std::string code, std::string context, std::string message) {
    warnings.push_back({std::move(code), std::move(context), std::move(message)});
  }
  std::size_t count(const std::string& code) const {
    std::size_t n = 0;
    for (const auto& w : warnings) n += (w.code == code);
    return n;
  }
  bool empty() const noexcept { return warnings.empty(); }
  void merge(const Diagnostics& other) {
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  }
};

}  // namespace bfstats
