#pragma once

// Flat key=value run settings. Later sources override earlier ones:
// defaults, then a config file, then command-line flags.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "bdc/likelihood.hpp"

namespace bdc::cli {

/// Bad or conflicting command-line input; exit code 2.
class ArgumentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Settings {
public:
  void set(const std::string &key, const std::string &value) { values_[key] = value; }
  [[nodiscard]] bool has(const std::string &key) const { return values_.count(key) != 0; }
  void erase(const std::string &key) { values_.erase(key); }

  /// Lines are `key = value`; blank lines and `#` comments are skipped.
  void merge_file(const std::filesystem::path &path);
  /// Copies every entry of `other` over this one.
  void overlay(const Settings &other);
  [[nodiscard]] std::string render() const;

  [[nodiscard]] std::string text(const std::string &key, const std::string &fallback) const;
  [[nodiscard]] double real(const std::string &key, double fallback) const;
  [[nodiscard]] std::size_t count(const std::string &key, std::size_t fallback) const;
  [[nodiscard]] bool flag(const std::string &key, bool fallback) const;
  [[nodiscard]] std::optional<double> maybe_real(const std::string &key) const;

  /// Likelihood parameters stored under `prefix` (e.g. "l1."), if all of
  /// them are present; throws ArgumentError when only some are.
  [[nodiscard]] std::optional<LikelihoodConfig> likelihood(const std::string &prefix) const;
  void store_likelihood(const std::string &prefix, const LikelihoodConfig &cfg);

private:
  std::map<std::string, std::string> values_;
};

[[nodiscard]] std::string format_real(double v);

} // namespace bdc::cli
