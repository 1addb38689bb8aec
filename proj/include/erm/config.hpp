#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace erm {

// Flat `key = value` configuration with dotted keys, `#` comments, and blank
// lines. Values are strings until a typed getter is called; getters record
// problems in `errors` instead of throwing so a bad file reports every issue
// at once.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback, std::vector<std::string>& errors) const;
  int get_int(const std::string& key, int fallback, std::vector<std::string>& errors) const;
  bool get_bool(const std::string& key, bool fallback, std::vector<std::string>& errors) const;
  std::vector<std::uint64_t> get_seed_list(const std::string& key,
                                           std::vector<std::uint64_t> fallback,
                                           std::vector<std::string>& errors) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string serialize() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace erm
