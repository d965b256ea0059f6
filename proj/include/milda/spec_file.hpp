#pragma once

// Flat key = value experiment files. '#' starts a comment, blank lines are
// ignored, later assignments override earlier ones. Command-line overrides
// are applied with set().

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace milda {

class SpecFile {
 public:
  static SpecFile parse(const std::string& text);
  static SpecFile load(const std::string& path);

  /// Parses "key=value".
  void set_assignment(const std::string& kv);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ConfigError naming the first key outside `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

  /// Canonical "key=value\n" text in key order.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::string fnv1a_hex(const std::string& text);

}  // namespace milda
