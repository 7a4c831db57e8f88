#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fingerkin/types.hpp"

namespace fingerkin {

/// Flat `key = value` document. Blank lines and `#` comments are ignored.
/// Vector values are whitespace- or comma-separated numbers.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  Vec3 vec3(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::string text(const std::string& key) const;

  /// Keys present in the document but never read through an accessor.
  std::vector<std::string> unused_keys() const;

  const std::string& origin() const { return origin_; }

 private:
  const std::string& raw(const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> touched_;
};

}  // namespace fingerkin
