#include "settings.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "bdc/io.hpp"

namespace bdc::cli {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

constexpr std::array<const char *, 7> kLikelihoodKeys{
    "delta1", "delta2", "mu", "beta", "zeta", "gamma_rate", "theta_rate"};

} // namespace

std::string format_real(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), r.ptr};
}

void Settings::merge_file(const std::filesystem::path &path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ArgumentError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    }
    values_[key] = trim(line.substr(eq + 1));
  }
}

void Settings::overlay(const Settings &other) {
  for (const auto &[k, v] : other.values_) values_[k] = v;
}

std::string Settings::render() const {
  std::string out;
  for (const auto &[k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string Settings::text(const std::string &key, const std::string &fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::optional<double> Settings::maybe_real(const std::string &key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  const std::string &s = it->second;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ArgumentError(key + ": not a number: '" + s + "'");
  }
  return v;
}

double Settings::real(const std::string &key, double fallback) const {
  return maybe_real(key).value_or(fallback);
}

std::size_t Settings::count(const std::string &key, std::size_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string &s = it->second;
  std::size_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ArgumentError(key + ": not a non-negative integer: '" + s + "'");
  }
  return v;
}

bool Settings::flag(const std::string &key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ArgumentError(key + ": expected true or false, got '" + it->second + "'");
}

std::optional<LikelihoodConfig> Settings::likelihood(const std::string &prefix) const {
  std::size_t present = 0;
  for (const char *k : kLikelihoodKeys) present += has(prefix + k);
  if (present == 0) return std::nullopt;
  if (present != kLikelihoodKeys.size()) {
    throw ArgumentError("incomplete likelihood parameters under '" + prefix + "'");
  }
  LikelihoodConfig c;
  c.delta1 = real(prefix + "delta1", 0.0);
  c.delta2 = real(prefix + "delta2", 0.0);
  c.mu = real(prefix + "mu", 0.0);
  c.beta = real(prefix + "beta", 0.0);
  c.zeta = real(prefix + "zeta", 0.0);
  c.gamma_rate = real(prefix + "gamma_rate", 0.0);
  c.theta_rate = real(prefix + "theta_rate", 0.0);
  return c;
}

void Settings::store_likelihood(const std::string &prefix, const LikelihoodConfig &cfg) {
  set(prefix + "delta1", format_real(cfg.delta1));
  set(prefix + "delta2", format_real(cfg.delta2));
  set(prefix + "mu", format_real(cfg.mu));
  set(prefix + "beta", format_real(cfg.beta));
  set(prefix + "zeta", format_real(cfg.zeta));
  set(prefix + "gamma_rate", format_real(cfg.gamma_rate));
  set(prefix + "theta_rate", format_real(cfg.theta_rate));
}

} // namespace bdc::cli
