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

#ifndef TWR_EXPERIMENT_HPP
#define TWR_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "twr/analysis.hpp"
#include "twr/channel.hpp"
#include "twr/network.hpp"
#include "twr/parallel.hpp"
#include "twr/rates.hpp"
#include "twr/selection.hpp"

namespace twr {

inline constexpr std::string_view kVersion = "twr-sim 1.0.0";

/// Protocol label of the interference-free LC-CF reference rows.
inline constexpr std::string_view kNoInterferenceLabel = "LC_CF_NoInterference";

enum class SweepKind { SnrScalingN, SnrFixedN, NSweep, LemmaVerify };

inline std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::SnrScalingN: return "SnrScalingN";
    case SweepKind::SnrFixedN: return "SnrFixedN";
    case SweepKind::NSweep: return "NSweep";
    case SweepKind::LemmaVerify: return "LemmaVerify";
  }
  return "?";
}

inline std::optional<SweepKind> parse_sweep_kind(std::string_view s) {
  for (SweepKind k : {SweepKind::SnrScalingN, SweepKind::SnrFixedN, SweepKind::NSweep, SweepKind::LemmaVerify})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct SweepSpec {
  SweepKind kind = SweepKind::SnrFixedN;
  std::vector<double> snr_points_db;
  /// Relay counts; ignored by SnrScalingN, which derives N from the SNR.
  std::vector<std::size_t> n_points;
  std::vector<Protocol> protocols{std::begin(kAllProtocols), std::end(kAllProtocols)};
  std::vector<Selector> selectors{std::begin(kAllSelectors), std::end(kAllSelectors)};
  std::size_t trials = 10000;
  bool include_no_interference_bound = false;
  /// SnrScalingN only: N = round(SNR^(K-1)) instead of round(SNR^(2(K-1))).
  bool under_scaled = false;
  /// SnrScalingN drops SNR points whose derived N exceeds this.
  std::size_t max_n = 100000;
  /// Refuse any point with K * N * trials above this.
  double work_budget = 5e9;
  std::size_t threads = default_threads();
};

struct SweepRow {
  std::string kind;
  std::string protocol;
  std::string selector;
  std::size_t k = 0;
  std::size_t n = 0;
  double snr_db = 0.0;
  std::size_t trials = 0;
  double mean_sum_rate = 0.0;
  double ci95_halfwidth = 0.0;
  double outage_prob = 0.0;
  double mean_selected_til = 0.0;
  double p_c_estimate = 0.0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
  std::string version{kVersion};
  /// SNR points dropped by the relay-count cap.
  std::vector<double> skipped_snr_db;
};

class WorkBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepPoint {
  double snr_db;
  std::size_t n;
};

/// Relay count tied to the SNR by the scaling rule.
inline std::size_t scaled_relay_count(std::size_t k, double snr_db, bool under_scaled) {
  const double exponent = (under_scaled ? 1.0 : 2.0) * static_cast<double>(k - 1);
  const double n = std::round(std::pow(db_to_linear(snr_db), exponent));
  return static_cast<std::size_t>(std::max(1.0, n));
}

inline std::vector<SweepPoint> sweep_points(const SweepSpec& spec, const NetworkConfig& cfg,
                                            std::vector<double>* skipped = nullptr) {
  std::vector<SweepPoint> pts;
  if (spec.kind == SweepKind::SnrScalingN) {
    for (double s : spec.snr_points_db) {
      const double exact = std::pow(db_to_linear(s), (spec.under_scaled ? 1.0 : 2.0) * static_cast<double>(cfg.k - 1));
      if (exact > static_cast<double>(spec.max_n)) {
        if (skipped) skipped->push_back(s);
        continue;
      }
      pts.push_back({s, scaled_relay_count(cfg.k, s, spec.under_scaled)});
    }
    return pts;
  }
  for (double s : spec.snr_points_db)
    for (std::size_t n : spec.n_points) pts.push_back({s, n});
  return pts;
}

inline void validate_spec(const SweepSpec& spec) {
  if (spec.snr_points_db.empty()) throw std::invalid_argument("sweep: snr_points_db must be non-empty");
  if (spec.kind != SweepKind::SnrScalingN && spec.n_points.empty())
    throw std::invalid_argument("sweep: n_points must be non-empty");
  if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (spec.protocols.empty() && !spec.include_no_interference_bound)
    throw std::invalid_argument("sweep: no protocols requested");
  if (spec.selectors.empty()) throw std::invalid_argument("sweep: no selectors requested");
  for (std::size_t n : spec.n_points)
    if (n < 1) throw std::invalid_argument("sweep: relay counts must be >= 1");
}

/// LC-CF rates with every interference term removed.
inline RateReport no_interference_bound(const ChannelRealization& c, const SelectionResult& sel, double snr) {
  return rate_lccf(c, sel, InterferenceProfile(c.pairs()), snr);
}

inline SelectionResult run_selector(Selector s, const ChannelRealization& c, const TilMatrix& til,
                                    const NetworkConfig& cfg, std::uint64_t trial) {
  switch (s) {
    case Selector::ORS: return select_ors(til, cfg.epsilon, cfg.t_max, {cfg.outage_fallback});
    case Selector::MaxMinSnr: return select_max_min_snr(c);
    case Selector::Random: {
      TrialRng rng(cfg.seed, trial, Stream::RandomSelection);
      return select_random(c, rng);
    }
  }
  return SelectionResult(c.pairs(), s);
}

namespace detail {

struct SelectorTally {
  std::size_t outages = 0;
  double til_sum = 0.0;
  std::size_t til_count = 0;
  bool decoupled = false;
};

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Runs one sweep point; rows come out in (selector, protocol) order.
inline std::vector<SweepRow> run_point(const SweepSpec& spec, const NetworkConfig& base, const SweepPoint& pt) {
  NetworkConfig cfg = base;
  cfg.n = pt.n;
  cfg.snr_db = pt.snr_db;
  const double snr = cfg.snr_linear();

  const std::size_t n_sel = spec.selectors.size();
  const std::size_t n_rate = spec.protocols.size() + (spec.include_no_interference_bound ? 1 : 0);
  const std::size_t trials = spec.trials;
  std::vector<double> rates(trials * n_sel * n_rate, 0.0);
  std::vector<SelectorTally> tallies(trials * n_sel);

  parallel_for(trials, spec.threads, [&](std::size_t t) {
    const auto c = generate_channels(cfg, t);
    const auto til = compute_til(c);
    for (std::size_t s = 0; s < n_sel; ++s) {
      const auto sel = run_selector(spec.selectors[s], c, til, cfg, t);
      auto& tally = tallies[t * n_sel + s];
      tally.outages = sel.outage_count();
      for (std::size_t i = 0; i < sel.pairs(); ++i)
        if (sel.assigned(i)) {
          tally.til_sum += sel.selected_til[i];
          ++tally.til_count;
        }
      tally.decoupled = decoupled(sel, snr, cfg.epsilon);
      const auto prof = interference_profile(c, sel, snr);
      double* out = &rates[(t * n_sel + s) * n_rate];
      for (std::size_t p = 0; p < spec.protocols.size(); ++p)
        out[p] = compute_rates(spec.protocols[p], c, sel, prof, snr).sum_rate;
      if (spec.include_no_interference_bound)
        out[n_rate - 1] = no_interference_bound(c, sel, snr).sum_rate;
    }
  });

  std::vector<SweepRow> rows;
  for (std::size_t s = 0; s < n_sel; ++s) {
    SelectorTally total;
    std::size_t decoupled_count = 0;
    std::vector<Accumulator> acc(n_rate);
    // Fixed reduction order by trial index.
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& tally = tallies[t * n_sel + s];
      total.outages += tally.outages;
      total.til_sum += tally.til_sum;
      total.til_count += tally.til_count;
      decoupled_count += tally.decoupled ? 1 : 0;
      const double* in = &rates[(t * n_sel + s) * n_rate];
      for (std::size_t p = 0; p < n_rate; ++p) {
        acc[p].sum += in[p];
        acc[p].sum_sq += in[p] * in[p];
      }
    }
    const double nt = static_cast<double>(trials);
    for (std::size_t p = 0; p < n_rate; ++p) {
      SweepRow row;
      row.kind = std::string(to_string(spec.kind));
      row.protocol = p < spec.protocols.size() ? std::string(to_string(spec.protocols[p]))
                                               : std::string(kNoInterferenceLabel);
      row.selector = std::string(to_string(spec.selectors[s]));
      row.k = cfg.k;
      row.n = cfg.n;
      row.snr_db = cfg.snr_db;
      row.trials = trials;
      row.mean_sum_rate = acc[p].sum / nt;
      if (trials > 1) {
        const double var = std::max(0.0, (acc[p].sum_sq - nt * row.mean_sum_rate * row.mean_sum_rate) / (nt - 1.0));
        row.ci95_halfwidth = 1.959963984540054 * std::sqrt(var / nt);
      }
      row.outage_prob = static_cast<double>(total.outages) / (nt * static_cast<double>(cfg.k));
      row.mean_selected_til = total.til_count > 0 ? total.til_sum / static_cast<double>(total.til_count)
                                                  : std::numeric_limits<double>::quiet_NaN();
      row.p_c_estimate = static_cast<double>(decoupled_count) / nt;
      row.seed = cfg.seed;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace detail

inline void sort_rows(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.kind, a.protocol, a.selector, a.snr_db, a.n) <
           std::tie(b.kind, b.protocol, b.selector, b.snr_db, b.n);
  });
}

/// Monte Carlo sweep. Output depends only on (spec, cfg), never on the
/// thread count.
inline SweepResult run_sweep(const SweepSpec& spec, const NetworkConfig& cfg) {
  require_valid(cfg);
  validate_spec(spec);
  SweepResult result;
  result.seed = cfg.seed;
  const auto points = sweep_points(spec, cfg, &result.skipped_snr_db);
  for (const auto& pt : points) {
    const double work = static_cast<double>(cfg.k) * static_cast<double>(pt.n) * static_cast<double>(spec.trials);
    if (work > spec.work_budget)
      throw WorkBudgetExceeded("work budget exceeded at point (K=" + std::to_string(cfg.k) +
                               ", N=" + std::to_string(pt.n) + ", snr_db=" + std::to_string(pt.snr_db) +
                               ", trials=" + std::to_string(spec.trials) + "): K*N*trials = " +
                               std::to_string(work) + " > " + std::to_string(spec.work_budget));
  }
  for (const auto& pt : points) {
    auto rows = detail::run_point(spec, cfg, pt);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  sort_rows(result.rows);
  return result;
}

/// Rows of one (protocol, selector) curve ordered by SNR.
inline std::vector<RatePoint> rate_curve(const SweepResult& r, std::string_view protocol, std::string_view selector) {
  std::vector<RatePoint> pts;
  for (const auto& row : r.rows)
    if (row.protocol == protocol && row.selector == selector) pts.push_back({row.snr_db, row.mean_sum_rate});
  std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) { return a.snr_db < b.snr_db; });
  return pts;
}

/// Smallest grid SNR from which selector_a beats selector_b at every
/// remaining grid point.
inline std::optional<double> crossover_snr(const SweepResult& r, Protocol protocol, Selector a, Selector b) {
  const auto pa = rate_curve(r, to_string(protocol), to_string(a));
  const auto pb = rate_curve(r, to_string(protocol), to_string(b));
  if (pa.empty() || pa.size() != pb.size())
    throw std::invalid_argument("crossover_snr: selectors are not on a common SNR grid");
  for (std::size_t p = 0; p < pa.size(); ++p) {
    if (pa[p].snr_db != pb[p].snr_db)
      throw std::invalid_argument("crossover_snr: selectors are not on a common SNR grid");
    if (p > 0 && pa[p].snr_db == pa[p - 1].snr_db)
      throw std::invalid_argument("crossover_snr: several rows share an SNR point");
  }
  std::optional<double> from;
  for (std::size_t p = pa.size(); p-- > 0;) {
    if (pa[p].mean_sum_rate > pb[p].mean_sum_rate)
      from = pa[p].snr_db;
    else
      break;
  }
  return from;
}

}  // namespace twr

#endif  // TWR_EXPERIMENT_HPP
