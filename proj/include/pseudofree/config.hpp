#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "pseudofree/error.hpp"
#include "pseudofree/forms.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/resolution.hpp"

namespace pseudofree {

enum class OutputFormat { Text, Json };

struct RunConfig {
  std::size_t order_cap = kDefaultOrderCap;
  int oracle_degree_cap = 8;
  std::uint64_t search_cap = kDefaultSearchCap;
  OutputFormat format = OutputFormat::Text;
  unsigned threads = 0;  // 0: one per hardware thread
  OracleLimits oracle;

  void validate() const {
    if (order_cap == 0 || oracle_degree_cap <= 0 || search_cap == 0 || oracle.bar_cost_bound == 0 ||
        oracle.resolution_rank_bound == 0)
      fail(ErrorKind::InvalidParameters, "configuration caps must be positive");
  }
};

inline constexpr const char* kConfigEnvVar = "PSEUDOFREE_CONFIG";

namespace detail {

inline std::uint64_t config_number(const std::string& key, const std::string& value, std::size_t line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || value[0] == '-')
    fail(ErrorKind::InvalidParameters,
         "config line " + std::to_string(line) + ": " + key + " needs a nonnegative integer, got '" + value + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace detail

/// key = value lines; '#' starts a comment. Unknown keys are errors.
inline RunConfig parse_config(const std::string& text, RunConfig cfg = {}) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::InvalidParameters, "config line " + std::to_string(line) + ": expected key = value");
    const std::string key = detail::trim(raw.substr(0, eq)), value = detail::trim(raw.substr(eq + 1));
    if (key == "order_cap") cfg.order_cap = detail::config_number(key, value, line);
    else if (key == "oracle_degree_cap") cfg.oracle_degree_cap = static_cast<int>(detail::config_number(key, value, line));
    else if (key == "search_cap") cfg.search_cap = detail::config_number(key, value, line);
    else if (key == "threads") cfg.threads = static_cast<unsigned>(detail::config_number(key, value, line));
    else if (key == "bar_cost_bound") cfg.oracle.bar_cost_bound = detail::config_number(key, value, line);
    else if (key == "resolution_rank_bound") cfg.oracle.resolution_rank_bound = detail::config_number(key, value, line);
    else if (key == "format") {
      if (value == "text") cfg.format = OutputFormat::Text;
      else if (value == "json") cfg.format = OutputFormat::Json;
      else fail(ErrorKind::InvalidParameters, "config line " + std::to_string(line) + ": format is text or json");
    } else {
      fail(ErrorKind::InvalidParameters, "config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidParameters, "cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), base);
}

/// Defaults, overridden by the file named in PSEUDOFREE_CONFIG if set.
inline RunConfig load_config_from_env() {
  const char* path = std::getenv(kConfigEnvVar);
  if (!path || !*path) return {};
  return load_config_file(path);
}

}  // namespace pseudofree
