#include "fingerkin/keyvalue.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fingerkin/errors.hpp"

namespace fingerkin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& token, const std::string& key, const std::string& origin) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || !std::isfinite(v))
    throw FingerError(ErrorCode::InvalidParams, origin + ": key '" + key + "' has non-numeric value '" + token + "'");
  return v;
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FingerError(ErrorCode::InvalidParams, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw FingerError(ErrorCode::InvalidParams, origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.values_.count(key))
      throw FingerError(ErrorCode::InvalidParams, origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv.values_.emplace(std::move(key), std::move(value));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FingerError(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const std::string& KeyValueFile::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw FingerError(ErrorCode::InvalidParams, origin_ + ": missing key '" + key + "'");
  touched_.insert(key);
  return it->second;
}

std::vector<double> KeyValueFile::numbers(const std::string& key) const {
  std::string value = raw(key);
  for (char& c : value)
    if (c == ',') c = ' ';
  std::istringstream in(value);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(to_double(token, key, origin_));
  return out;
}

double KeyValueFile::number(const std::string& key) const {
  const auto v = numbers(key);
  if (v.size() != 1)
    throw FingerError(ErrorCode::InvalidParams, origin_ + ": key '" + key + "' expects one number");
  return v.front();
}

double KeyValueFile::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

Vec3 KeyValueFile::vec3(const std::string& key) const {
  const auto v = numbers(key);
  if (v.size() != 3)
    throw FingerError(ErrorCode::InvalidParams, origin_ + ": key '" + key + "' expects three numbers");
  return {v[0], v[1], v[2]};
}

std::string KeyValueFile::text(const std::string& key) const { return raw(key); }

std::vector<std::string> KeyValueFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!touched_.count(k)) out.push_back(k);
  return out;
}

}  // namespace fingerkin
