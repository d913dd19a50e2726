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

#ifndef TWR_CHANNEL_HPP
#define TWR_CHANNEL_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "twr/network.hpp"

namespace twr {

/// Node group of a CN: group One and group Two sit on opposite sides of the
/// relays.
enum class Group : std::size_t { One = 0, Two = 1 };

inline constexpr Group other(Group n) { return n == Group::One ? Group::Two : Group::One; }

/// Independent random streams drawn within one trial.
enum class Stream : std::uint32_t { Channel = 0, RandomSelection = 1 };

/// Per-trial generator keyed on (master seed, trial index, stream). Avoids
/// sequential reuse so trials can be computed in any order.
class TrialRng {
 public:
  TrialRng(std::uint64_t master_seed, std::uint64_t trial, Stream stream = Stream::Channel) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(trial),
                      static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream),
                      0x74777231u};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform_open0() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// CN(0,1) sample: real and imaginary parts each with variance 1/2.
  std::complex<double> complex_gaussian() {
    // Polar Box-Muller: |h|^2 = -ln(u1) is exactly Exp(1).
    const double radius = std::sqrt(-std::log(uniform_open0()));
    const double phase = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(phase), radius * std::sin(phase)};
  }

 private:
  std::mt19937_64 engine_;
};

/// One block-fading realization: h(n, i, j) is the coefficient between CN i of
/// group n and relay j. The same coefficient serves both time slots.
class ChannelRealization {
 public:
  ChannelRealization(std::size_t k, std::size_t n, std::uint64_t seed_tag = 0)
      : k_(k), n_(n), seed_tag_(seed_tag), gains_(2 * k * n) {}

  std::size_t pairs() const { return k_; }
  std::size_t relays() const { return n_; }
  std::uint64_t seed_tag() const { return seed_tag_; }

  std::complex<double>& at(Group g, std::size_t i, std::size_t j) {
    return gains_[index(g, i, j)];
  }
  const std::complex<double>& at(Group g, std::size_t i, std::size_t j) const {
    return gains_[index(g, i, j)];
  }

  /// |h|^2 without bounds checks; hot loops go through here.
  double power(Group g, std::size_t i, std::size_t j) const {
    return std::norm(gains_[index(g, i, j)]);
  }

  bool all_finite() const {
    for (const auto& h : gains_)
      if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) return false;
    return true;
  }

  const std::vector<std::complex<double>>& raw() const { return gains_; }

 private:
  std::size_t index(Group g, std::size_t i, std::size_t j) const {
    return (static_cast<std::size_t>(g) * k_ + i) * n_ + j;
  }

  std::size_t k_;
  std::size_t n_;
  std::uint64_t seed_tag_;
  std::vector<std::complex<double>> gains_;
};

/// i.i.d. CN(0,1) coefficients for the given trial. Pure in (cfg.seed, trial).
inline ChannelRealization generate_channels(const NetworkConfig& cfg, std::uint64_t trial) {
  ChannelRealization c(cfg.k, cfg.n, trial);
  TrialRng rng(cfg.seed, trial, Stream::Channel);
  for (Group g : {Group::One, Group::Two})
    for (std::size_t i = 0; i < cfg.k; ++i)
      for (std::size_t j = 0; j < cfg.n; ++j) c.at(g, i, j) = rng.complex_gaussian();
  return c;
}

/// Checked accessor for |h_{n(i),R(j)}|^2.
inline double gain_power(const ChannelRealization& c, Group g, std::size_t i, std::size_t j) {
  if (static_cast<std::size_t>(g) > 1 || i >= c.pairs() || j >= c.relays())
    throw std::out_of_range("gain_power: index (" + std::to_string(static_cast<std::size_t>(g)) +
                            ", " + std::to_string(i) + ", " + std::to_string(j) +
                            ") out of range for K=" + std::to_string(c.pairs()) +
                            ", N=" + std::to_string(c.relays()));
  return c.power(g, i, j);
}

}  // namespace twr

#endif  // TWR_CHANNEL_HPP
