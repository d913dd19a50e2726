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

#ifndef TWR_NETWORK_HPP
#define TWR_NETWORK_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace twr {

/// Relaying protocol. The relay encoding and CN decoding functions are never
/// evaluated symbol by symbol; the protocol only picks the rate expression.
enum class Protocol { AF, DF, LC_CF };

/// Relay selection policy.
enum class Selector { ORS, MaxMinSnr, Random };

inline constexpr Protocol kAllProtocols[] = {Protocol::AF, Protocol::DF, Protocol::LC_CF};
inline constexpr Selector kAllSelectors[] = {Selector::ORS, Selector::MaxMinSnr, Selector::Random};

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::AF: return "AF";
    case Protocol::DF: return "DF";
    case Protocol::LC_CF: return "LC_CF";
  }
  return "?";
}

inline std::string_view to_string(Selector s) {
  switch (s) {
    case Selector::ORS: return "ORS";
    case Selector::MaxMinSnr: return "MaxMinSnr";
    case Selector::Random: return "Random";
  }
  return "?";
}

inline std::optional<Protocol> parse_protocol(std::string_view s) {
  if (s == "AF" || s == "af") return Protocol::AF;
  if (s == "DF" || s == "df") return Protocol::DF;
  if (s == "LC_CF" || s == "lc_cf" || s == "LC-CF" || s == "lc-cf" || s == "CF" || s == "cf")
    return Protocol::LC_CF;
  return std::nullopt;
}

inline std::optional<Selector> parse_selector(std::string_view s) {
  if (s == "ORS" || s == "ors") return Selector::ORS;
  if (s == "MaxMinSnr" || s == "maxmin" || s == "max-min" || s == "max_min_snr")
    return Selector::MaxMinSnr;
  if (s == "Random" || s == "random") return Selector::Random;
  return std::nullopt;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Independent variables of one experiment. Transmit power is normalized to
/// one, so the noise variance is 1/snr_linear().
struct NetworkConfig {
  std::size_t k = 2;
  std::size_t n = 50;
  double snr_db = 20.0;
  double epsilon = 1.0;
  double t_max = 1.0;
  std::uint64_t seed = 7;
  // When set, ORS pairs left without a relay take the lowest-TIL free relay
  // regardless of epsilon.
  bool outage_fallback = false;

  double snr_linear() const { return db_to_linear(snr_db); }
  double noise_variance() const { return 1.0 / snr_linear(); }
};

struct ValidationOutcome {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

inline ValidationOutcome validate_config(const NetworkConfig& cfg) {
  ValidationOutcome out;
  if (cfg.k < 1) out.violations.emplace_back("K must be >= 1");
  if (cfg.n < 1) out.violations.emplace_back("N must be >= 1");
  if (!std::isfinite(cfg.snr_db)) out.violations.emplace_back("snr_db must be finite");
  // NaN fails both comparisons, so test the positive form.
  if (!(cfg.epsilon > 0.0)) out.violations.emplace_back("epsilon must be > 0");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max))
    out.violations.emplace_back("t_max must be finite and > 0");
  if (cfg.k >= 1 && cfg.n >= 1 && cfg.n < cfg.k)
    out.warnings.emplace_back("N < K, outage possible");
  return out;
}

class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(const ValidationOutcome& v)
      : std::invalid_argument(join(v.violations)) {}

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string s = "invalid configuration:";
    for (const auto& it : items) s += " " + it + ";";
    return s;
  }
};

inline void require_valid(const NetworkConfig& cfg) {
  auto v = validate_config(cfg);
  if (!v.ok()) throw InvalidConfig(v);
}

}  // namespace twr

#endif  // TWR_NETWORK_HPP
