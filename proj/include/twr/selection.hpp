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

#ifndef TWR_SELECTION_HPP
#define TWR_SELECTION_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "twr/channel.hpp"
#include "twr/network.hpp"

namespace twr {

/// Total interference level eta(i, j): the interference relay j would collect
/// from, and leak to, every pair other than i if it served pair i.
class TilMatrix {
 public:
  TilMatrix(std::size_t k, std::size_t n) : k_(k), n_(n), til_(k * n, 0.0) {}

  std::size_t pairs() const { return k_; }
  std::size_t relays() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return til_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return til_[i * n_ + j]; }

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<double> til_;
};

/// eta for a single (pair, relay) entry.
inline double til_entry(const ChannelRealization& c, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t m = 0; m < c.pairs(); ++m) {
    if (m == i) continue;
    s += c.power(Group::One, m, j) + c.power(Group::Two, m, j);
  }
  return 2.0 * s;
}

inline TilMatrix compute_til(const ChannelRealization& c) {
  TilMatrix til(c.pairs(), c.relays());
  for (std::size_t i = 0; i < c.pairs(); ++i)
    for (std::size_t j = 0; j < c.relays(); ++j) til(i, j) = til_entry(c, i, j);
  return til;
}

struct SelectionResult {
  Selector selector = Selector::ORS;
  /// Relay serving each pair; empty means outage.
  std::vector<std::optional<std::size_t>> assignment;
  /// eta of each pair at its assigned relay, NaN on outage.
  std::vector<double> selected_til;
  /// 1-based selection rank of each assigned pair.
  std::vector<std::optional<std::size_t>> order;
  /// Largest fired back-off timer (ORS only; 0 otherwise).
  double elapsed = 0.0;

  explicit SelectionResult(std::size_t k = 0, Selector s = Selector::ORS)
      : selector(s),
        assignment(k),
        selected_til(k, std::numeric_limits<double>::quiet_NaN()),
        order(k) {}

  std::size_t pairs() const { return assignment.size(); }
  bool assigned(std::size_t i) const { return assignment[i].has_value(); }
  std::size_t relay_of(std::size_t i) const { return *assignment[i]; }

  std::size_t assigned_count() const {
    return static_cast<std::size_t>(
        std::count_if(assignment.begin(), assignment.end(), [](const auto& a) { return a.has_value(); }));
  }
  std::size_t outage_count() const { return pairs() - assigned_count(); }
};

namespace detail {

struct Assigner {
  SelectionResult result;
  std::vector<bool> relay_taken;
  std::size_t rank = 0;

  Assigner(std::size_t k, std::size_t n, Selector s) : result(k, s), relay_taken(n, false) {}

  bool free(std::size_t i, std::size_t j) const {
    return !result.assignment[i] && !relay_taken[j];
  }

  void take(std::size_t i, std::size_t j, double til) {
    result.assignment[i] = j;
    result.selected_til[i] = til;
    result.order[i] = ++rank;
    relay_taken[j] = true;
  }
};

}  // namespace detail

struct OrsOptions {
  bool outage_fallback = false;
};

/// Distributed back-off selection. Every (pair, relay) with eta < epsilon arms
/// a timer eta / epsilon * t_max; timers fire in ascending order and a firing
/// timer claims its relay for its pair if both are still free, which is where
/// the other relays' timers for that pair (and that relay's other timers) are
/// deactivated. Ties go to the lower relay index, then the lower pair index.
inline SelectionResult select_ors(const TilMatrix& til, double epsilon, double t_max,
                                  OrsOptions opts = {}) {
  const std::size_t k = til.pairs(), n = til.relays();
  struct Timer {
    double eta;
    std::size_t relay;
    std::size_t pair;
  };
  std::vector<Timer> timers;
  timers.reserve(k * n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (til(i, j) < epsilon) timers.push_back({til(i, j), j, i});

  // The timer value is a strictly increasing function of eta for finite
  // epsilon, so events are ordered on eta directly. With epsilon = inf every
  // timer reads zero, yet the firing order is still the eta order.
  auto by_fire_time = [](const Timer& a, const Timer& b) {
    return std::tie(a.eta, a.relay, a.pair) < std::tie(b.eta, b.relay, b.pair);
  };
  std::sort(timers.begin(), timers.end(), by_fire_time);

  detail::Assigner a(k, n, Selector::ORS);
  std::size_t remaining = std::min(k, n);
  for (const Timer& t : timers) {
    if (remaining == 0) break;
    if (!a.free(t.pair, t.relay)) continue;
    a.take(t.pair, t.relay, t.eta);
    a.result.elapsed = std::isfinite(epsilon) ? t.eta / epsilon * t_max : 0.0;
    --remaining;
  }

  if (opts.outage_fallback) {
    while (remaining > 0) {
      std::optional<Timer> best;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < k; ++i) {
          if (!a.free(i, j)) continue;
          Timer cand{til(i, j), j, i};
          if (!best || by_fire_time(cand, *best)) best = cand;
        }
      if (!best) break;
      a.take(best->pair, best->relay, best->eta);
      --remaining;
    }
  }
  return std::move(a.result);
}

/// Greedy global max-min-SNR baseline: repeatedly take the free (pair, relay)
/// with the largest min(|h1|^2, |h2|^2).
inline SelectionResult select_max_min_snr(const ChannelRealization& c) {
  const std::size_t k = c.pairs(), n = c.relays();
  std::vector<double> metric(k * n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j)
      metric[i * n + j] = std::min(c.power(Group::One, i, j), c.power(Group::Two, i, j));

  detail::Assigner a(k, n, Selector::MaxMinSnr);
  for (std::size_t step = 0; step < std::min(k, n); ++step) {
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (a.relay_taken[j]) continue;
      for (std::size_t i = 0; i < k; ++i) {
        if (a.result.assignment[i]) continue;
        if (metric[i * n + j] > best) {
          best = metric[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    a.take(bi, bj, til_entry(c, bi, bj));
  }
  return std::move(a.result);
}

/// Uniformly random distinct-relay matching. Pairs are matched in index order
/// to the first min(K, N) entries of a uniformly shuffled relay list.
inline SelectionResult select_random(const ChannelRealization& c, TrialRng& rng) {
  const std::size_t k = c.pairs(), n = c.relays();
  std::vector<std::size_t> relays(n);
  std::iota(relays.begin(), relays.end(), std::size_t{0});
  const std::size_t take = std::min(k, n);
  // Partial Fisher-Yates.
  for (std::size_t s = 0; s < take; ++s) {
    const std::size_t r = s + static_cast<std::size_t>(rng.below(n - s));
    std::swap(relays[s], relays[r]);
  }
  detail::Assigner a(k, n, Selector::Random);
  for (std::size_t i = 0; i < take; ++i) a.take(i, relays[i], til_entry(c, i, relays[i]));
  return std::move(a.result);
}

}  // namespace twr

#endif  // TWR_SELECTION_HPP
