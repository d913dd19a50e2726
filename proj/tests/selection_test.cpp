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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "twr/selection.hpp"

namespace twr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TilMatrix matrix(const std::vector<std::vector<double>>& rows) {
  TilMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[0].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

// Exhaustive greedy: scan every free (pair, relay) cell for the smallest eta,
// ties to the lower relay then the lower pair.
std::vector<std::optional<std::size_t>> greedy_oracle(const TilMatrix& m, double epsilon) {
  std::vector<std::optional<std::size_t>> out(m.pairs());
  std::vector<bool> used(m.relays(), false);
  for (;;) {
    std::optional<std::tuple<double, std::size_t, std::size_t>> best;
    for (std::size_t i = 0; i < m.pairs(); ++i) {
      if (out[i]) continue;
      for (std::size_t j = 0; j < m.relays(); ++j) {
        if (used[j] || !(m(i, j) < epsilon)) continue;
        std::tuple<double, std::size_t, std::size_t> cand{m(i, j), j, i};
        if (!best || cand < *best) best = cand;
      }
    }
    if (!best) return out;
    out[std::get<2>(*best)] = std::get<1>(*best);
    used[std::get<1>(*best)] = true;
  }
}

void expect_well_formed(const SelectionResult& r) {
  std::set<std::size_t> relays;
  std::set<std::size_t> ranks;
  for (std::size_t i = 0; i < r.pairs(); ++i) {
    if (!r.assigned(i)) {
      EXPECT_FALSE(r.order[i].has_value());
      EXPECT_TRUE(std::isnan(r.selected_til[i]));
      continue;
    }
    EXPECT_TRUE(relays.insert(r.relay_of(i)).second) << "relay assigned twice";
    ASSERT_TRUE(r.order[i].has_value());
    ranks.insert(*r.order[i]);
  }
  // order is a bijection onto {1..#assigned}.
  EXPECT_EQ(ranks.size(), r.assigned_count());
  if (!ranks.empty()) {
    EXPECT_EQ(*ranks.begin(), 1u);
    EXPECT_EQ(*ranks.rbegin(), r.assigned_count());
  }
}

TEST(ComputeTil, SinglePairHasNoInterference) {
  const NetworkConfig cfg{1, 6, 10.0, 1.0, 1.0, 3};
  const auto til = compute_til(generate_channels(cfg, 0));
  for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(til(0, j), 0.0);
}

TEST(ComputeTil, TwoPairArithmetic) {
  // Pair 2's powers at relay 0 are 0.5 and 0.3.
  const auto c = testing::channel_from_powers({{{1.0, 2.0}, {0.5, 7.0}}, {{4.0, 1.0}, {0.3, 1.0}}});
  const auto til = compute_til(c);
  EXPECT_NEAR(til(0, 0), 1.6, 1e-12);
  EXPECT_NEAR(til(1, 0), 2.0 * (1.0 + 4.0), 1e-12);
  EXPECT_NEAR(til(0, 1), 2.0 * (7.0 + 1.0), 1e-12);
}

TEST(ComputeTil, ScalesQuadraticallyAndIgnoresOwnPair) {
  const NetworkConfig cfg{3, 4, 10.0, 1.0, 1.0, 11};
  auto c = generate_channels(cfg, 1);
  const auto before = compute_til(c);
  const double own_pair_term = 2.0 * (c.power(Group::One, 2, 1) + c.power(Group::Two, 2, 1));
  // Doubling pair 2's amplitudes at relay 1 quadruples its part of eta(0, 1).
  c.at(Group::One, 2, 1) *= 2.0;
  c.at(Group::Two, 2, 1) *= 2.0;
  const auto after = compute_til(c);
  EXPECT_NEAR(after(0, 1) - before(0, 1), 3.0 * own_pair_term, 1e-12);
  // eta(2, j) does not depend on pair 2's own channels.
  for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(after(2, j), before(2, j));
}

TEST(SelectOrs, OnlyCandidate) {
  const auto r = select_ors(matrix({{0.0}}), 1.0, 1.0);
  ASSERT_TRUE(r.assigned(0));
  EXPECT_EQ(r.relay_of(0), 0u);
  EXPECT_EQ(r.selected_til[0], 0.0);
  EXPECT_EQ(*r.order[0], 1u);
  EXPECT_EQ(r.elapsed, 0.0);
}

TEST(SelectOrs, TwoByTwoExample) {
  const auto m = matrix({{0.2, 0.9}, {0.5, 0.1}});
  const auto r = select_ors(m, 1.0, 1.0);
  EXPECT_EQ(r.relay_of(1), 1u);
  EXPECT_EQ(r.relay_of(0), 0u);
  EXPECT_EQ(*r.order[1], 1u);
  EXPECT_EQ(*r.order[0], 2u);
  EXPECT_DOUBLE_EQ(r.selected_til[0], 0.2);
  EXPECT_DOUBLE_EQ(r.selected_til[1], 0.1);
  EXPECT_DOUBLE_EQ(r.elapsed, 0.2);

  // Brute force over every firing order of the four timers: the sequence
  // that fires in ascending time is the only consistent one.
  std::vector<std::pair<std::size_t, std::size_t>> cells{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::sort(cells.begin(), cells.end());
  std::optional<std::vector<std::optional<std::size_t>>> chronological;
  do {
    bool ascending = true;
    for (std::size_t s = 1; s < cells.size(); ++s)
      ascending &= m(cells[s - 1].first, cells[s - 1].second) <= m(cells[s].first, cells[s].second);
    if (!ascending) continue;
    std::vector<std::optional<std::size_t>> assign(2);
    std::vector<bool> used(2, false);
    for (auto [i, j] : cells)
      if (!assign[i] && !used[j]) assign[i] = j, used[j] = true;
    chronological = assign;
  } while (std::next_permutation(cells.begin(), cells.end()));
  ASSERT_TRUE(chronological.has_value());
  EXPECT_EQ(*chronological, r.assignment);
}

TEST(SelectOrs, AllAboveEpsilonIsOutage) {
  const auto r = select_ors(matrix({{2.0, 3.0, 5.0}}), 1.0, 1.0);
  EXPECT_FALSE(r.assigned(0));
  EXPECT_EQ(r.outage_count(), 1u);
  EXPECT_EQ(r.elapsed, 0.0);
}

TEST(SelectOrs, OutageFallbackTakesMinimumTil) {
  const auto m = matrix({{2.0, 3.0, 5.0}});
  const auto r = select_ors(m, 1.0, 1.0, {.outage_fallback = true});
  ASSERT_TRUE(r.assigned(0));
  EXPECT_EQ(r.relay_of(0), 0u);
  EXPECT_DOUBLE_EQ(r.selected_til[0], 2.0);
}

TEST(SelectOrs, TiesGoToLowerRelayThenLowerPair) {
  const auto r = select_ors(matrix({{0.5, 0.5}, {0.5, 0.5}}), 1.0, 1.0);
  // (relay 0, pair 0) then (relay 1, pair 1).
  EXPECT_EQ(r.relay_of(0), 0u);
  EXPECT_EQ(r.relay_of(1), 1u);
  EXPECT_EQ(*r.order[0], 1u);
}

TEST(SelectOrs, MatchesGreedyOracleOnRandomMatrices) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t k = 1 + gen() % 4, n = 1 + gen() % 12;
    TilMatrix m(k, n);
    std::exponential_distribution<> ex(0.5);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = ex(gen);
    // Coarse values force ties now and then.
    if (trial % 3 == 0)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = std::round(m(i, j));
    const double eps = trial % 2 ? kInf : 1.5;
    const double t_max = 0.25;
    const auto r = select_ors(m, eps, t_max);
    ASSERT_EQ(r.assignment, greedy_oracle(m, eps));
    expect_well_formed(r);
    EXPECT_LE(r.elapsed, t_max);
    for (std::size_t i = 0; i < k; ++i)
      if (r.assigned(i)) {
        EXPECT_LT(r.selected_til[i], eps);
      }
    if (std::isinf(eps)) {
      EXPECT_EQ(r.assigned_count(), std::min(k, n));
    }
  }
}

TEST(SelectOrs, MoreRelaysNeverRaiseFirstSelectedTil) {
  std::mt19937_64 gen(8);
  std::exponential_distribution<> ex(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + gen() % 3;
    std::vector<std::vector<double>> rows(k, std::vector<double>(3));
    for (auto& row : rows)
      for (auto& v : row) v = ex(gen);
    double prev = kInf;
    for (int grow = 0; grow < 6; ++grow) {
      const auto r = select_ors(matrix(rows), kInf, 1.0);
      double first = kInf;
      for (std::size_t i = 0; i < k; ++i)
        if (r.assigned(i) && *r.order[i] == 1) first = r.selected_til[i];
      EXPECT_LE(first, prev);
      prev = first;
      for (auto& row : rows) row.push_back(ex(gen));
    }
  }
}

TEST(SelectOrs, MinimumTilFollowsOrderStatisticScaling) {
  // Near zero F(x) ~ x^{2(K-1)} = x^2 for K = 2, so the minimum over N
  // relays scales like N^{-1/2}.
  const std::size_t relay_counts[] = {100, 1000, 10000};
  std::vector<double> log_n, log_mean;
  std::vector<double> normalized;
  for (std::size_t n : relay_counts) {
    const NetworkConfig cfg{2, n, 10.0, 1.0, 1.0, 31};
    const int trials = 400;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto til = compute_til(generate_channels(cfg, t));
      double best = kInf;
      for (std::size_t j = 0; j < n; ++j) best = std::min(best, til(0, j));
      sum += best;
    }
    const double mean = sum / trials;
    log_n.push_back(std::log(static_cast<double>(n)));
    log_mean.push_back(std::log(mean));
    normalized.push_back(mean * std::sqrt(static_cast<double>(n)));
  }
  const double slope = ((log_mean[2] - log_mean[0]) / (log_n[2] - log_n[0]));
  EXPECT_NEAR(slope, -0.5, 0.1);
  const auto [lo, hi] = std::minmax_element(normalized.begin(), normalized.end());
  EXPECT_LT(*hi / *lo, 2.0);
}

TEST(SelectMaxMinSnr, SinglePairPicksLargerMinimum) {
  // min-gains across relays: 0.4 and 0.9.
  const auto c = testing::channel_from_powers({{{0.4, 2.0}}, {{1.0, 0.9}}});
  const auto r = select_max_min_snr(c);
  EXPECT_EQ(r.relay_of(0), 1u);
  EXPECT_EQ(r.selector, Selector::MaxMinSnr);
}

TEST(SelectMaxMinSnr, GlobalGreedyOrder) {
  // min-gain matrix [[0.5, 0.8], [0.7, 0.9]].
  const auto c = testing::channel_from_powers({{{0.5, 0.8}, {0.7, 0.9}}, {{3.0, 3.0}, {3.0, 3.0}}});
  const auto r = select_max_min_snr(c);
  EXPECT_EQ(r.relay_of(1), 1u);
  EXPECT_EQ(*r.order[1], 1u);
  EXPECT_EQ(r.relay_of(0), 0u);
  EXPECT_EQ(*r.order[0], 2u);
  // selected_til is still reported from the TIL metric.
  EXPECT_NEAR(r.selected_til[0], compute_til(c)(0, 0), 1e-12);
}

TEST(SelectMaxMinSnr, InvariantUnderCommonScaling) {
  const NetworkConfig cfg{3, 8, 10.0, 1.0, 1.0, 4};
  for (int t = 0; t < 50; ++t) {
    auto c = generate_channels(cfg, t);
    const auto before = select_max_min_snr(c);
    for (Group g : {Group::One, Group::Two})
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 8; ++j) c.at(g, i, j) *= 3.7;
    EXPECT_EQ(select_max_min_snr(c).assignment, before.assignment);
    expect_well_formed(before);
  }
}

TEST(SelectMaxMinSnr, RelaysExhaustedMeansOutage) {
  const NetworkConfig cfg{3, 2, 10.0, 1.0, 1.0, 4};
  const auto r = select_max_min_snr(generate_channels(cfg, 0));
  EXPECT_EQ(r.assigned_count(), 2u);
  EXPECT_EQ(r.outage_count(), 1u);
}

TEST(SelectRandom, EqualCountsGiveUniformPermutation) {
  const NetworkConfig cfg{3, 3, 10.0, 1.0, 1.0, 9};
  const auto c = generate_channels(cfg, 0);
  std::map<std::vector<std::optional<std::size_t>>, int> freq;
  constexpr int kTrials = 60000;
  for (int t = 0; t < kTrials; ++t) {
    TrialRng rng(cfg.seed, t, Stream::RandomSelection);
    const auto r = select_random(c, rng);
    EXPECT_EQ(r.assigned_count(), 3u);
    ++freq[r.assignment];
  }
  EXPECT_EQ(freq.size(), 6u);
  for (const auto& [perm, count] : freq) EXPECT_NEAR(count / double(kTrials), 1.0 / 6.0, 0.01);
}

TEST(SelectRandom, SinglePairUniformOverRelays) {
  const NetworkConfig cfg{1, 10, 10.0, 1.0, 1.0, 9};
  const auto c = generate_channels(cfg, 0);
  std::vector<int> hist(10, 0);
  constexpr int kTrials = 100000;
  for (int t = 0; t < kTrials; ++t) {
    TrialRng rng(cfg.seed, t, Stream::RandomSelection);
    ++hist[select_random(c, rng).relay_of(0)];
  }
  for (int h : hist) EXPECT_NEAR(h / double(kTrials), 0.1, 0.01);
}

TEST(SelectRandom, FewerRelaysThanPairs) {
  const NetworkConfig cfg{5, 3, 10.0, 1.0, 1.0, 9};
  const auto c = generate_channels(cfg, 0);
  TrialRng rng(1, 1, Stream::RandomSelection);
  const auto r = select_random(c, rng);
  EXPECT_EQ(r.assigned_count(), 3u);
  EXPECT_EQ(r.outage_count(), 2u);
  expect_well_formed(r);
}

}  // namespace
}  // namespace twr
