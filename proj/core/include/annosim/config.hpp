#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace annosim {

/// Line-oriented key=value configuration with dotted section keys
/// (e.g. "oracle.preset=fast"). '#' starts a comment; blank lines are
/// ignored. Lookups that fail to parse raise ConfigError naming the key.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& content);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

  /// Throws ConfigError on any key outside `known`, naming the offender.
  void require_known(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace annosim
