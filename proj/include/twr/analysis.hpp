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

#ifndef TWR_ANALYSIS_HPP
#define TWR_ANALYSIS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twr/channel.hpp"
#include "twr/network.hpp"
#include "twr/parallel.hpp"
#include "twr/rates.hpp"
#include "twr/selection.hpp"

namespace twr {

namespace detail {

// Series expansion, valid and fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), used for x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma_p: shape must be > 0");
  if (x < 0.0 || std::isnan(x)) throw std::domain_error("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_fraction(a, x);
}

/// Law of eta for a pair at a fixed relay: eta/2 is chi-square with 4(K-1)
/// degrees of freedom. Only meaningful for K >= 2.
struct TilDistribution {
  std::size_t k;
  double c1;
  double c2;

  explicit TilDistribution(std::size_t pairs) : k(pairs) {
    if (pairs < 2) throw std::domain_error("TilDistribution: K must be >= 2");
    const double km1 = static_cast<double>(k - 1);
    const double gamma_shape = std::tgamma(2.0 * km1);
    c1 = std::exp(-1.0) * std::pow(2.0, -4.0 * static_cast<double>(k) + 3.0) / (km1 * gamma_shape);
    c2 = std::pow(2.0, -4.0 * km1) / (km1 * gamma_shape);
  }

  double shape() const { return 2.0 * static_cast<double>(k - 1); }
  double exponent() const { return shape(); }
};

inline double til_cdf(std::size_t k, double x) {
  if (k < 2) throw std::domain_error("til_cdf: K must be >= 2");
  if (x < 0.0 || std::isnan(x)) throw std::domain_error("til_cdf: x must be >= 0");
  return regularized_gamma_p(2.0 * static_cast<double>(k - 1), x / 4.0);
}

/// CDF of eta when every coefficient has E|h|^2 = channel_variance. The
/// til_cdf form above is the channel_variance = 2 case (unit-variance real and
/// imaginary parts); CN(0,1) channels correspond to channel_variance = 1.
inline double til_cdf_for_variance(std::size_t k, double x, double channel_variance) {
  if (!(channel_variance > 0.0)) throw std::domain_error("til_cdf_for_variance: variance must be > 0");
  return til_cdf(k, 2.0 * x / channel_variance);
}

struct CdfBounds {
  double lower;
  double upper;
};

/// Power-law sandwich C1 x^{2(K-1)} <= F(x) <= C2 x^{2(K-1)}, valid on (0, 2).
inline CdfBounds til_cdf_bounds(std::size_t k, double x) {
  if (!(x > 0.0 && x < 2.0)) throw std::domain_error("til_cdf_bounds: x must lie in (0, 2)");
  const TilDistribution d(k);
  const double p = std::pow(x, d.exponent());
  return {d.c1 * p, d.c2 * p};
}

/// Probability that at least one of (N - K + 1) free relays has eta below x.
inline double success_probability_direct(std::size_t k, std::size_t n, double x) {
  const double f = til_cdf(k, x);
  return -std::expm1(static_cast<double>(n - k + 1) * std::log1p(-f));
}

/// Lower bound on success_probability_direct obtained from the CDF sandwich.
inline double success_probability_bound(std::size_t k, std::size_t n, double x) {
  const auto b = til_cdf_bounds(k, x);
  return -std::expm1(static_cast<double>(n) * std::log1p(-b.lower) -
                     static_cast<double>(k - 1) * std::log1p(-b.upper));
}

/// Looser bound after (1 - y)^N <= 1 / (1 + N y).
inline double success_probability_relaxed(std::size_t k, std::size_t n, double x) {
  const auto b = til_cdf_bounds(k, x);
  return -std::expm1(-static_cast<double>(k - 1) * std::log1p(-b.upper) -
                     std::log1p(static_cast<double>(n) * b.lower));
}

struct Interval {
  double lower;
  double upper;

  bool disjoint(const Interval& o) const { return upper < o.lower || o.upper < lower; }
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The interval touches 0 (or 1) exactly when no (or every) trial succeeded.
  const double lower = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double upper = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lower, upper};
}

struct ProbabilityEstimate {
  double estimate;
  Interval ci95;
  std::size_t successes;
  std::size_t trials;
};

/// True when every pair is served and the total normalized interference
/// stays below epsilon. Uses sum(delta) = snr * sum(selected eta), which
/// holds whenever no pair is in outage.
inline bool decoupled(const SelectionResult& sel, double snr, double epsilon) {
  if (sel.outage_count() > 0) return false;
  double s = 0.0;
  for (double t : sel.selected_til) s += t;
  return s * snr < epsilon;
}

/// Monte Carlo estimate of the probability that ORS decouples the network.
inline ProbabilityEstimate decoupling_probability(const NetworkConfig& cfg, std::size_t trials,
                                                  std::size_t threads = default_threads()) {
  require_valid(cfg);
  if (trials < 1) throw std::invalid_argument("decoupling_probability: trials must be >= 1");
  const double snr = cfg.snr_linear();
  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto c = generate_channels(cfg, t);
    const auto sel = select_ors(compute_til(c), cfg.epsilon, cfg.t_max, {cfg.outage_fallback});
    hit[t] = decoupled(sel, snr, cfg.epsilon) ? 1 : 0;
  });
  const std::size_t s = std::accumulate(hit.begin(), hit.end(), std::size_t{0});
  return {static_cast<double>(s) / static_cast<double>(trials), wilson_interval(s, trials), s, trials};
}

struct RatePoint {
  double snr_db;
  double mean_sum_rate;
};

/// Empirical DoF: least-squares slope of the sum rate against log2(SNR).
inline double dof_slope(std::span<const RatePoint> points) {
  if (points.size() < 3) throw std::invalid_argument("dof_slope: need at least 3 points");
  for (std::size_t p = 1; p < points.size(); ++p)
    if (!(points[p].snr_db > points[p - 1].snr_db))
      throw std::invalid_argument("dof_slope: SNR points must be strictly increasing");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += std::log2(db_to_linear(p.snr_db));
    my += p.mean_sum_rate;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : points) {
    const double dx = std::log2(db_to_linear(p.snr_db)) - mx;
    sxy += dx * (p.mean_sum_rate - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace twr

#endif  // TWR_ANALYSIS_HPP
