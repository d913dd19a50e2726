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

#ifndef TWR_RATES_HPP
#define TWR_RATES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "twr/channel.hpp"
#include "twr/network.hpp"
#include "twr/selection.hpp"

namespace twr {

/// Expected interference powers normalized by the noise variance. Pairs in
/// outage neither transmit nor have a relay, so they contribute nothing and
/// carry all-zero entries.
struct InterferenceProfile {
  std::vector<double> i_relay;                // at the serving relay, Time 1
  std::array<std::vector<double>, 2> i_cn;    // at CN (group, pair), Time 2
  std::vector<double> delta;                  // relay + both CNs

  explicit InterferenceProfile(std::size_t k = 0)
      : i_relay(k, 0.0), i_cn{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)}, delta(k, 0.0) {}

  double cn(Group g, std::size_t i) const { return i_cn[static_cast<std::size_t>(g)][i]; }
  double total() const {
    double s = 0.0;
    for (double d : delta) s += d;
    return s;
  }
};

inline InterferenceProfile interference_profile(const ChannelRealization& c,
                                                const SelectionResult& sel, double snr) {
  const std::size_t k = c.pairs();
  InterferenceProfile prof(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!sel.assigned(i)) continue;
    const std::size_t r = sel.relay_of(i);
    double at_relay = 0.0, at_cn1 = 0.0, at_cn2 = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      if (m == i || !sel.assigned(m)) continue;
      at_relay += c.power(Group::One, m, r) + c.power(Group::Two, m, r);
      const std::size_t rm = sel.relay_of(m);
      at_cn1 += c.power(Group::One, i, rm);
      at_cn2 += c.power(Group::Two, i, rm);
    }
    prof.i_relay[i] = at_relay * snr;
    prof.i_cn[0][i] = at_cn1 * snr;
    prof.i_cn[1][i] = at_cn2 * snr;
    prof.delta[i] = prof.i_relay[i] + prof.i_cn[0][i] + prof.i_cn[1][i];
  }
  return prof;
}

struct RateReport {
  Protocol protocol = Protocol::AF;
  /// per_pair[i][n]: rate of the message sent by CN i of group n, bits/use.
  std::vector<std::array<double, 2>> per_pair;
  double sum_rate = 0.0;
  std::vector<std::size_t> outage_pairs;
  /// AF amplifying coefficients (NaN for outage pairs); empty for DF/LC-CF.
  std::vector<double> amplify_gains;

  RateReport(std::size_t k, Protocol p) : protocol(p), per_pair(k, {0.0, 0.0}) {}

  double pair_sum(std::size_t i) const { return per_pair[i][0] + per_pair[i][1]; }
};

namespace detail {

inline double half_log2(double x) { return 0.5 * std::log2(x); }

inline RateReport start_report(const SelectionResult& sel, Protocol p) {
  RateReport rep(sel.pairs(), p);
  for (std::size_t i = 0; i < sel.pairs(); ++i)
    if (!sel.assigned(i)) rep.outage_pairs.push_back(i);
  return rep;
}

inline void finish_report(RateReport& rep) {
  rep.sum_rate = 0.0;
  for (const auto& r : rep.per_pair) rep.sum_rate += r[0] + r[1];
}

}  // namespace detail

/// Relay amplifying coefficient meeting the relay power constraint with
/// equality (P = 1, N0 = 1/snr).
inline double af_gamma(const ChannelRealization& c, const SelectionResult& sel,
                       const InterferenceProfile& prof, std::size_t i, double snr) {
  const std::size_t r = sel.relay_of(i);
  const double received = c.power(Group::One, i, r) + c.power(Group::Two, i, r) +
                          prof.i_relay[i] / snr + 1.0 / snr;
  return 1.0 / std::sqrt(received);
}

/// Amplify-and-forward with perfect removal of the CN's own echoed symbol.
inline RateReport rate_af(const ChannelRealization& c, const SelectionResult& sel,
                          const InterferenceProfile& prof, double snr) {
  RateReport rep = detail::start_report(sel, Protocol::AF);
  rep.amplify_gains.assign(sel.pairs(), std::numeric_limits<double>::quiet_NaN());
  const double n0 = 1.0 / snr;
  for (std::size_t i = 0; i < sel.pairs(); ++i) {
    if (!sel.assigned(i)) continue;
    const std::size_t r = sel.relay_of(i);
    const double gamma = af_gamma(c, sel, prof, i, snr);
    const double g2 = gamma * gamma;
    rep.amplify_gains[i] = gamma;
    const double inr_relay = prof.i_relay[i] * n0;  // E|I_R|^2
    for (Group n : {Group::One, Group::Two}) {
      const Group rx = other(n);
      const double h_tx = c.power(n, i, r);
      const double h_rx = c.power(rx, i, r);
      const double signal = g2 * h_tx * h_rx;
      const double noise = g2 * h_rx * inr_relay + prof.cn(rx, i) * n0 + (g2 * h_rx + 1.0) * n0;
      rep.per_pair[i][static_cast<std::size_t>(n)] = detail::half_log2(1.0 + signal / noise);
    }
  }
  detail::finish_report(rep);
  return rep;
}

/// Lattice-code compute-and-forward: each direction is limited by the Time-1
/// computation rate and the Time-2 broadcast rate at the receiving CN.
inline RateReport rate_lccf(const ChannelRealization& c, const SelectionResult& sel,
                            const InterferenceProfile& prof, double snr) {
  RateReport rep = detail::start_report(sel, Protocol::LC_CF);
  for (std::size_t i = 0; i < sel.pairs(); ++i) {
    if (!sel.assigned(i)) continue;
    const std::size_t r = sel.relay_of(i);
    const double g1 = c.power(Group::One, i, r), g2 = c.power(Group::Two, i, r);
    const double gsum = g1 + g2;
    for (Group n : {Group::One, Group::Two}) {
      const Group rx = other(n);
      const double h_tx = c.power(n, i, r);
      const double tau = gsum > 0.0 ? h_tx / gsum : 0.0;
      const double uplink_arg = tau + h_tx * snr / (prof.i_relay[i] + 1.0);
      const double uplink = uplink_arg > 1.0 ? detail::half_log2(uplink_arg) : 0.0;
      const double downlink = detail::half_log2(1.0 + c.power(rx, i, r) * snr / (prof.cn(rx, i) + 1.0));
      rep.per_pair[i][static_cast<std::size_t>(n)] = std::min(uplink, downlink);
    }
  }
  detail::finish_report(rep);
  return rep;
}

/// Decode-and-forward with network-coded broadcast. Only the pair sum is
/// bounded; the per-direction split is proportional to the individual
/// decoding rates and is a diagnostic.
inline RateReport rate_df(const ChannelRealization& c, const SelectionResult& sel,
                          const InterferenceProfile& prof, double snr) {
  RateReport rep = detail::start_report(sel, Protocol::DF);
  for (std::size_t i = 0; i < sel.pairs(); ++i) {
    if (!sel.assigned(i)) continue;
    const std::size_t r = sel.relay_of(i);
    std::array<double, 2> single{};
    for (Group n : {Group::One, Group::Two})
      single[static_cast<std::size_t>(n)] =
          detail::half_log2(1.0 + c.power(n, i, r) * snr / (prof.cn(n, i) + 1.0));
    const double per_direction = std::min(single[0], single[1]);
    const double mac_sum = detail::half_log2(
        1.0 + (c.power(Group::One, i, r) + c.power(Group::Two, i, r)) * snr / (prof.i_relay[i] + 1.0));
    const double pair_sum = std::min(2.0 * per_direction, mac_sum);
    const double weight = single[0] + single[1];
    if (weight > 0.0) {
      rep.per_pair[i][0] = pair_sum * single[0] / weight;
      rep.per_pair[i][1] = pair_sum - rep.per_pair[i][0];
    }
  }
  detail::finish_report(rep);
  return rep;
}

inline RateReport compute_rates(Protocol p, const ChannelRealization& c, const SelectionResult& sel,
                                const InterferenceProfile& prof, double snr) {
  switch (p) {
    case Protocol::AF: return rate_af(c, sel, prof, snr);
    case Protocol::DF: return rate_df(c, sel, prof, snr);
    case Protocol::LC_CF: return rate_lccf(c, sel, prof, snr);
  }
  return RateReport(sel.pairs(), p);
}

}  // namespace twr

#endif  // TWR_RATES_HPP
