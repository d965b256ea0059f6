#include "milda/spec_file.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "milda/error.hpp"
#include "milda/model_json.hpp"

namespace milda {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& v, const char* type) {
  raise(ErrorCode::ConfigError, "key '" + key + "': '" + v + "' is not " + type);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "a number");
  return out;
}

}  // namespace

SpecFile SpecFile::parse(const std::string& text) {
  SpecFile f;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      raise(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    f.set_assignment(line);
  }
  return f;
}

SpecFile SpecFile::load(const std::string& path) {
  return parse(read_text_file(path));
}

void SpecFile::set_assignment(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) raise(ErrorCode::ConfigError, "expected key=value, got '" + kv + "'");
  set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
}

void SpecFile::set(const std::string& key, const std::string& value) {
  if (key.empty()) raise(ErrorCode::ConfigError, "empty key");
  values_[key] = value;
}

std::optional<std::string> SpecFile::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string SpecFile::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double SpecFile::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

long SpecFile::get_int(const std::string& key, long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  long out = 0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size() || v->empty()) bad_value(key, *v, "an integer");
  return out;
}

std::uint64_t SpecFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size() || v->empty()) {
    bad_value(key, *v, "an unsigned integer");
  }
  return out;
}

bool SpecFile::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes") return true;
  if (*v == "0" || *v == "false" || *v == "no") return false;
  bad_value(key, *v, "a boolean");
}

std::vector<double> SpecFile::get_doubles(const std::string& key,
                                          const std::vector<double>& fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) bad_value(key, *v, "a non-empty list");
  return out;
}

void SpecFile::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      raise(ErrorCode::ConfigError, "unknown key '" + k + "'");
    }
  }
}

std::string SpecFile::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string SpecFile::hash() const { return fnv1a_hex(canonical()); }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace milda
