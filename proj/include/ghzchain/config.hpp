#pragma once

// Flat "key = value" configuration for ChainSpec. Lines starting with '#' are
// comments; list-valued keys (gamma, kappa) take comma-separated numbers.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ghzchain/core_model.hpp"

namespace ghzchain {

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end || s.empty()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  long long x = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end || s.empty()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  std::uint64_t x = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end || s.empty()) throw ConfigError(key, "expected an unsigned integer, got '" + v + "'");
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key, "expected at least one value");
  return out;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace config_detail

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "N",      "scheme",       "g0",         "T",           "tau",
      "tau_divisor", "delta1",  "delta2",     "jprime_scale", "omega_edge",
      "stark_compensation",     "gamma",      "kappa",        "disorder_delta", "seed"};
  return keys;
}

/// Sets one key on `spec`; throws ConfigError for unknown keys or bad values.
inline void set_config_value(ChainSpec& spec, const std::string& key, const std::string& value) {
  using namespace config_detail;
  if (key == "N") {
    const auto n = to_int(key, value);
    if (n < 2 || n > 100000) throw ConfigError(key, "must be between 2 and 100000");
    spec.N = static_cast<int>(n);
  } else if (key == "scheme") {
    spec.scheme = parse_scheme(trim(value));
  } else if (key == "g0") {
    spec.g0 = to_double(key, value);
  } else if (key == "T") {
    spec.T = to_double(key, value);
  } else if (key == "tau") {
    const auto v = trim(value);
    if (v == "auto" || v.empty())
      spec.tau.reset();
    else
      spec.tau = to_double(key, v);
  } else if (key == "tau_divisor") {
    spec.tau_divisor = to_double(key, value);
  } else if (key == "delta1") {
    spec.delta1 = to_double(key, value);
  } else if (key == "delta2") {
    spec.delta2 = to_double(key, value);
  } else if (key == "jprime_scale") {
    spec.jprime_scale = to_double(key, value);
  } else if (key == "omega_edge") {
    spec.omega_edge = to_double(key, value);
  } else if (key == "stark_compensation") {
    spec.stark_compensation = to_bool(key, value);
  } else if (key == "gamma") {
    spec.gamma = to_list(key, value);
  } else if (key == "kappa") {
    spec.kappa = to_list(key, value);
  } else if (key == "disorder_delta") {
    spec.disorder_delta = to_double(key, value);
  } else if (key == "seed") {
    spec.seed = to_u64(key, value);
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

/// Parses config text on top of `base`. Validation is left to the caller.
inline ChainSpec parse_config(const std::string& text, ChainSpec base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(base, config_detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

inline ChainSpec load_config(const std::string& path, ChainSpec base = {}) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

/// Canonical text form; parse_config(serialize_config(s)) == s.
inline std::string serialize_config(const ChainSpec& s) {
  using config_detail::fmt;
  std::ostringstream o;
  o << "N = " << s.N << "\n";
  o << "scheme = " << scheme_name(s.scheme) << "\n";
  o << "g0 = " << fmt(s.g0) << "\n";
  o << "T = " << fmt(s.T) << "\n";
  o << "tau = " << (s.tau ? fmt(*s.tau) : std::string("auto")) << "\n";
  o << "tau_divisor = " << fmt(s.tau_divisor) << "\n";
  o << "delta1 = " << fmt(s.delta1) << "\n";
  o << "delta2 = " << fmt(s.delta2) << "\n";
  o << "jprime_scale = " << fmt(s.jprime_scale) << "\n";
  o << "omega_edge = " << fmt(s.omega_edge) << "\n";
  o << "stark_compensation = " << (s.stark_compensation ? "true" : "false") << "\n";
  o << "gamma = " << config_detail::fmt_list(s.gamma) << "\n";
  o << "kappa = " << config_detail::fmt_list(s.kappa) << "\n";
  o << "disorder_delta = " << fmt(s.disorder_delta) << "\n";
  o << "seed = " << s.seed << "\n";
  return o.str();
}

/// FNV-1a over the canonical text, as 16 hex digits.
inline std::string spec_hash(const ChainSpec& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(s)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ghzchain
