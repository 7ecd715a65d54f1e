#include "vortexemf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "vortexemf/errors.hpp"

namespace vemf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view s) {
  const auto pos = s.find('#');
  return pos == std::string_view::npos ? s : s.substr(0, pos);
}

bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace

void ConfigSection::add(std::string key, std::string value, int line) {
  const auto [it, inserted] = entries_.emplace(std::move(key), Entry{std::move(value), line});
  if (!inserted) {
    throw ParseError(source_ + ":" + std::to_string(line) + ": duplicate key '" + it->first + "'" +
                     (name_.empty() ? "" : " in [" + name_ + "]"));
  }
}

void ConfigSection::allow_only(std::initializer_list<std::string_view> keys) const {
  allow_only(std::set<std::string, std::less<>>(keys.begin(), keys.end()));
}

void ConfigSection::allow_only(const std::set<std::string, std::less<>>& keys) const {
  for (const auto& [key, entry] : entries_) {
    if (keys.count(key) == 0) {
      std::string allowed;
      for (const auto& k : keys) allowed += (allowed.empty() ? "" : ", ") + k;
      throw ParseError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'" +
                       (name_.empty() ? "" : " in [" + name_ + "]") + " (allowed: " + allowed + ")");
    }
  }
}

void ConfigSection::fail(std::string_view key, const std::string& what) const {
  const auto it = entries_.find(key);
  const std::string where = it == entries_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
  throw ParseError(where + ": key '" + std::string(key) + "'" + (name_.empty() ? "" : " in [" + name_ + "]") +
                   ": " + what);
}

std::optional<std::string> ConfigSection::text(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::string ConfigSection::text_or(std::string_view key, std::string fallback) const {
  auto v = text(key);
  return v ? *v : std::move(fallback);
}

std::string ConfigSection::require_text(std::string_view key) const {
  auto v = text(key);
  if (!v) fail(key, "is required");
  return *v;
}

std::optional<double> ConfigSection::real(std::string_view key) const {
  const auto v = text(key);
  if (!v) return std::nullopt;
  double x = 0.0;
  if (!parse_number(*v, x)) fail(key, "expected a real number, got '" + *v + "'");
  return x;
}

double ConfigSection::real_or(std::string_view key, double fallback) const { return real(key).value_or(fallback); }

double ConfigSection::require_real(std::string_view key) const {
  const auto v = real(key);
  if (!v) fail(key, "is required");
  return *v;
}

std::optional<long long> ConfigSection::integer(std::string_view key) const {
  const auto v = text(key);
  if (!v) return std::nullopt;
  long long x = 0;
  if (!parse_number(*v, x)) fail(key, "expected an integer, got '" + *v + "'");
  return x;
}

long long ConfigSection::integer_or(std::string_view key, long long fallback) const {
  return integer(key).value_or(fallback);
}

std::optional<std::uint64_t> ConfigSection::unsigned_integer(std::string_view key) const {
  const auto v = text(key);
  if (!v) return std::nullopt;
  std::uint64_t x = 0;
  if (trim(*v).starts_with('-') || !parse_number(*v, x)) fail(key, "expected a non-negative integer, got '" + *v + "'");
  return x;
}

bool ConfigSection::boolean_or(std::string_view key, bool fallback) const {
  const auto v = text(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "yes" || *v == "1" || *v == "on") return true;
  if (*v == "false" || *v == "no" || *v == "0" || *v == "off") return false;
  fail(key, "expected true or false, got '" + *v + "'");
}

std::optional<std::vector<double>> ConfigSection::reals(std::string_view key) const {
  const auto v = text(key);
  if (!v) return std::nullopt;
  std::vector<double> out;
  for (auto tok : split_ws(*v)) {
    double x = 0.0;
    if (!parse_number(tok, x)) fail(key, "expected real numbers, got '" + std::string(tok) + "'");
    out.push_back(x);
  }
  return out;
}

std::optional<std::vector<std::vector<double>>> ConfigSection::tuples(std::string_view key, std::size_t arity) const {
  const auto v = text(key);
  if (!v) return std::nullopt;
  std::vector<std::vector<double>> out;
  std::string_view rest = *v;
  while (true) {
    const auto pos = rest.find(';');
    const std::string_view part = trim(rest.substr(0, pos));
    if (!part.empty()) {
      std::vector<double> tuple;
      for (auto tok : split_ws(part)) {
        double x = 0.0;
        if (!parse_number(tok, x)) fail(key, "expected real numbers, got '" + std::string(tok) + "'");
        tuple.push_back(x);
      }
      if (tuple.size() != arity) {
        fail(key, "each ';'-separated entry needs " + std::to_string(arity) + " numbers, got '" + std::string(part) + "'");
      }
      out.push_back(std::move(tuple));
    }
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

ConfigFile ConfigFile::parse(std::istream& in, std::string source) {
  ConfigFile cfg;
  cfg.source_ = source;
  cfg.global_ = ConfigSection(source, "");
  ConfigSection* current = &cfg.global_;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const std::string where = source + ":" + std::to_string(line) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(where + "unterminated section header");
      const std::string_view name = trim(s.substr(1, s.size() - 2));
      if (!valid_name(name)) throw ParseError(where + "invalid section name '" + std::string(name) + "'");
      const auto [it, inserted] = cfg.sections_.emplace(std::string(name), ConfigSection(source, std::string(name)));
      if (!inserted) throw ParseError(where + "duplicate section [" + std::string(name) + "]");
      current = &it->second;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(where + "expected 'key = value'");
    const std::string_view key = trim(s.substr(0, eq));
    const std::string_view value = trim(s.substr(eq + 1));
    if (!valid_name(key)) throw ParseError(where + "invalid key '" + std::string(key) + "'");
    if (value.empty()) throw ParseError(where + "empty value for '" + std::string(key) + "'");
    current->add(std::string(key), std::string(value), line);
  }
  if (in.bad()) throw IoError("failed reading " + source);
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse(in, path);
}

const ConfigSection* ConfigFile::section(std::string_view name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

std::vector<std::string> ConfigFile::section_names() const {
  std::vector<std::string> out;
  for (const auto& [name, s] : sections_) out.push_back(name);
  return out;
}

void ConfigFile::allow_sections(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [name, s] : sections_) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw ParseError(source_ + ": unexpected section [" + name + "]");
    }
  }
}

}  // namespace vemf
