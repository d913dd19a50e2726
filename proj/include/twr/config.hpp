// Copyright 2026 The twr-sim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWR_CONFIG_HPP
#define TWR_CONFIG_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "twr/experiment.hpp"
#include "twr/network.hpp"

namespace twr {

/// Everything one CLI run needs: network parameters, sweep grid and the
/// output file name.
struct RunConfig {
  NetworkConfig net;
  SweepSpec sweep;
  std::string output;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double json_real(const nlohmann::json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("'" + key + "' must be a number");
}

inline std::uint64_t json_unsigned(const nlohmann::json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) return std::stoull(s);
  }
  throw ConfigError("'" + key + "' must be a non-negative integer");
}

inline bool json_bool(const nlohmann::json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
  }
  if (v.is_number_integer()) return v.get<long long>() != 0;
  throw ConfigError("'" + key + "' must be a boolean");
}

inline nlohmann::json as_array(const nlohmann::json& v) {
  return v.is_array() ? v : nlohmann::json::array({v});
}

}  // namespace detail

/// Applies one setting. Accepted keys are the fields documented in the README;
/// unknown keys are rejected.
inline void apply_setting(RunConfig& rc, const std::string& key, const nlohmann::json& v) {
  using namespace detail;
  if (key == "k") rc.net.k = json_unsigned(v, key);
  else if (key == "n") rc.net.n = json_unsigned(v, key);
  else if (key == "snr_db") rc.net.snr_db = json_real(v, key);
  else if (key == "epsilon") rc.net.epsilon = json_real(v, key);
  else if (key == "t_max") rc.net.t_max = json_real(v, key);
  else if (key == "seed") rc.net.seed = json_unsigned(v, key);
  else if (key == "outage_fallback") rc.net.outage_fallback = json_bool(v, key);
  else if (key == "kind") {
    const auto kind = v.is_string() ? parse_sweep_kind(v.get<std::string>()) : std::nullopt;
    if (!kind) throw ConfigError("'kind' must be one of SnrScalingN, SnrFixedN, NSweep, LemmaVerify");
    rc.sweep.kind = *kind;
  } else if (key == "snr_points_db") {
    rc.sweep.snr_points_db.clear();
    for (const auto& e : as_array(v)) rc.sweep.snr_points_db.push_back(json_real(e, key));
  } else if (key == "n_points") {
    rc.sweep.n_points.clear();
    for (const auto& e : as_array(v)) rc.sweep.n_points.push_back(json_unsigned(e, key));
  } else if (key == "protocols") {
    rc.sweep.protocols.clear();
    for (const auto& e : as_array(v)) {
      const auto p = e.is_string() ? parse_protocol(e.get<std::string>()) : std::nullopt;
      if (!p) throw ConfigError("unknown protocol " + e.dump());
      rc.sweep.protocols.push_back(*p);
    }
  } else if (key == "selectors") {
    rc.sweep.selectors.clear();
    for (const auto& e : as_array(v)) {
      const auto s = e.is_string() ? parse_selector(e.get<std::string>()) : std::nullopt;
      if (!s) throw ConfigError("unknown selector " + e.dump());
      rc.sweep.selectors.push_back(*s);
    }
  } else if (key == "trials") rc.sweep.trials = json_unsigned(v, key);
  else if (key == "include_no_interference_bound") rc.sweep.include_no_interference_bound = json_bool(v, key);
  else if (key == "under_scaled") rc.sweep.under_scaled = json_bool(v, key);
  else if (key == "max_n") rc.sweep.max_n = json_unsigned(v, key);
  else if (key == "work_budget") rc.sweep.work_budget = json_real(v, key);
  else if (key == "threads") {
    const auto t = json_unsigned(v, key);
    rc.sweep.threads = t == 0 ? default_threads() : t;
  } else if (key == "output") {
    if (!v.is_string()) throw ConfigError("'output' must be a string");
    rc.output = v.get<std::string>();
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

inline void apply_json(RunConfig& rc, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "comment" || key == "description") continue;
    apply_setting(rc, key, value);
  }
}

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
  try {
    return nlohmann::json::parse(f, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed config file '" + path.string() + "': " + e.what());
  }
}

/// Converts a command-line string into the JSON value apply_setting expects.
/// Comma-separated text becomes an array.
inline nlohmann::json parse_override_value(const std::string& text) {
  auto scalar = [](const std::string& s) -> nlohmann::json {
    try {
      auto j = nlohmann::json::parse(s);
      if (j.is_primitive()) return j;
    } catch (const nlohmann::json::exception&) {
    }
    return s;
  };
  if (text.find(',') == std::string::npos) return scalar(text);
  nlohmann::json arr = nlohmann::json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) arr.push_back(scalar(item));
  return arr;
}

inline nlohmann::json to_json(const RunConfig& rc) {
  nlohmann::json j;
  j["k"] = rc.net.k;
  j["n"] = rc.net.n;
  j["snr_db"] = rc.net.snr_db;
  if (std::isinf(rc.net.epsilon)) j["epsilon"] = "inf";
  else j["epsilon"] = rc.net.epsilon;
  j["t_max"] = rc.net.t_max;
  j["seed"] = rc.net.seed;
  j["outage_fallback"] = rc.net.outage_fallback;
  j["kind"] = std::string(to_string(rc.sweep.kind));
  j["snr_points_db"] = rc.sweep.snr_points_db;
  j["n_points"] = rc.sweep.n_points;
  nlohmann::json protocols = nlohmann::json::array(), selectors = nlohmann::json::array();
  for (auto p : rc.sweep.protocols) protocols.push_back(std::string(to_string(p)));
  for (auto s : rc.sweep.selectors) selectors.push_back(std::string(to_string(s)));
  j["protocols"] = protocols;
  j["selectors"] = selectors;
  j["trials"] = rc.sweep.trials;
  j["include_no_interference_bound"] = rc.sweep.include_no_interference_bound;
  j["under_scaled"] = rc.sweep.under_scaled;
  j["max_n"] = rc.sweep.max_n;
  j["work_budget"] = rc.sweep.work_budget;
  j["output"] = rc.output;
  return j;
}

}  // namespace twr

#endif  // TWR_CONFIG_HPP
