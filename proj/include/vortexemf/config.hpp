#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vemf {

/// One [section] of a key = value file. Lookups parse on demand and throw
/// ParseError naming the file, line and key on malformed values.
class ConfigSection {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  ConfigSection() = default;
  ConfigSection(std::string source, std::string name) : source_(std::move(source)), name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  bool has(std::string_view key) const { return entries_.count(std::string(key)) != 0; }
  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }
  void add(std::string key, std::string value, int line);

  /// Unknown keys are fatal (ParseError listing them).
  void allow_only(std::initializer_list<std::string_view> keys) const;
  void allow_only(const std::set<std::string, std::less<>>& keys) const;

  std::optional<std::string> text(std::string_view key) const;
  std::string text_or(std::string_view key, std::string fallback) const;
  std::string require_text(std::string_view key) const;
  std::optional<double> real(std::string_view key) const;
  double real_or(std::string_view key, double fallback) const;
  double require_real(std::string_view key) const;
  std::optional<long long> integer(std::string_view key) const;
  long long integer_or(std::string_view key, long long fallback) const;
  std::optional<std::uint64_t> unsigned_integer(std::string_view key) const;
  bool boolean_or(std::string_view key, bool fallback) const;
  /// Whitespace-separated reals.
  std::optional<std::vector<double>> reals(std::string_view key) const;
  /// ';'-separated tuples of exactly `arity` whitespace-separated reals.
  std::optional<std::vector<std::vector<double>>> tuples(std::string_view key, std::size_t arity) const;

 private:
  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

  std::string source_;
  std::string name_;
  std::map<std::string, Entry, std::less<>> entries_;
};

/// Line-oriented configuration: optional leading global keys, then
/// "[section]" headers, each followed by "key = value" lines. '#'
/// starts a comment. Duplicate keys or sections are parse errors.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, std::string source = "<config>");
  /// Unreadable files throw IoError.
  static ConfigFile load(const std::string& path);

  const ConfigSection& global() const { return global_; }
  const ConfigSection* section(std::string_view name) const;
  std::vector<std::string> section_names() const;
  /// Sections other than `allowed` are fatal.
  void allow_sections(std::initializer_list<std::string_view> allowed) const;
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  ConfigSection global_;
  std::map<std::string, ConfigSection, std::less<>> sections_;
};

}  // namespace vemf
