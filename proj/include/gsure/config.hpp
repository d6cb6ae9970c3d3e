#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gsure/common.hpp"

namespace gsure {

/// Flat "key = value" configuration with [section] headers and '#'
/// comments.  Keys are addressed as "section.key" ("" section for entries
/// before any header).  Unknown keys are rejected against a per-experiment
/// schema before a run starts.
class Config {
 public:
  static Config parse_string(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  std::vector<std::string> get_string_list(
      const std::string& key, const std::vector<std::string>& fallback) const;

  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

  /// Throws "config-error" when a key is present that the schema does not
  /// allow.
  void validate_keys(const std::set<std::string>& allowed) const;

  /// Sorted "key = value" lines; the canonical form that is echoed into
  /// reports and hashed for provenance.
  std::string canonical_text() const;
  std::uint64_t hash() const;  // FNV-1a 64 of the canonical text

 private:
  std::map<std::string, std::string> entries_;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace gsure
