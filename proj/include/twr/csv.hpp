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

#ifndef TWR_CSV_HPP
#define TWR_CSV_HPP

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twr/experiment.hpp"

namespace twr {

inline constexpr std::string_view kCsvHeader =
    "kind,protocol,selector,k,n,snr_db,trials,mean_sum_rate,ci95,outage_prob,mean_selected_til,p_c,seed";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ten significant digits, locale independent.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string to_csv(const SweepResult& result) {
  std::vector<SweepRow> rows = result.rows;
  sort_rows(rows);
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.kind + ',' + r.protocol + ',' + r.selector + ',' + std::to_string(r.k) + ',' + std::to_string(r.n) +
           ',' + format_real(r.snr_db) + ',' + std::to_string(r.trials) + ',' + format_real(r.mean_sum_rate) + ',' +
           format_real(r.ci95_halfwidth) + ',' + format_real(r.outage_prob) + ',' + format_real(r.mean_selected_til) +
           ',' + format_real(r.p_c_estimate) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

/// Writes the whole file next to its destination, then renames it into place.
inline void write_csv(const SweepResult& result, const std::filesystem::path& path) {
  const std::string body = to_csv(result);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing: " + std::strerror(errno));
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    f.flush();
    if (!f) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move result into '" + path.string() + "': " + ec.message());
  }
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

inline double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IoError("malformed number '" + s + "'");
  return v;
}

inline unsigned long long parse_unsigned(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end == s.c_str() || *end != '\0') throw IoError("malformed integer '" + s + "'");
  return v;
}

}  // namespace detail

inline std::vector<SweepRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("CSV header mismatch");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 13) throw IoError("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    SweepRow r;
    r.kind = f[0];
    r.protocol = f[1];
    r.selector = f[2];
    r.k = detail::parse_unsigned(f[3]);
    r.n = detail::parse_unsigned(f[4]);
    r.snr_db = detail::parse_real(f[5]);
    r.trials = detail::parse_unsigned(f[6]);
    r.mean_sum_rate = detail::parse_real(f[7]);
    r.ci95_halfwidth = detail::parse_real(f[8]);
    r.outage_prob = detail::parse_real(f[9]);
    r.mean_selected_til = detail::parse_real(f[10]);
    r.p_c_estimate = detail::parse_real(f[11]);
    r.seed = detail::parse_unsigned(f[12]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<SweepRow> read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace twr

#endif  // TWR_CSV_HPP
