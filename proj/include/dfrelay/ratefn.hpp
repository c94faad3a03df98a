// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Per-(subcarrier, destination) rate functions.
//
// Direct mode: the source sends two independent symbols, one per slot, and the
// sum power is split equally, giving R_D(P) = 2 ln(1 + G_su P / 2).
//
// Relay-aided mode: the source broadcasts with power P_s, a relay subset S
// decodes and beamforms coherently with the remaining P - P_s. The achievable
// SNR is
//
//   min{ P_s * min_{i in S} G_sr(i),  P_s * G_su + (sum_{i in S} sqrt(P_i G_ru(i)))^2 }.
//
// The relay share is best split in proportion to G_ru, which turns the second
// term into P_s G_su + (P - P_s) T(S) with T(S) = sum_{i in S} G_ru(i). Sorting
// relays by increasing G_sr, the optimum subset is always a suffix of that
// order and the maximized SNR is linear in P: R_R(P) = ln(1 + G1 P) where the
// effective gain G1 follows from three geometric cases (see
// relay_aided_solution()).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dfrelay/channel.hpp"

namespace dfrelay {

/// Rate of the direct mode with sum power P (nats per two slots).
inline double direct_rate(double g_su, double power) {
  if (!(g_su >= 0.0) || !(power >= 0.0))
    throw std::invalid_argument("direct_rate: gain and power must be nonnegative");
  return 2.0 * std::log1p(g_su * power / 2.0);
}

/// ln(1 + G1 P), the relay-aided rate for an effective gain G1.
inline double relay_rate_from_gain(double g1, double power) {
  if (!(g1 >= 0.0) || !(power >= 0.0))
    throw std::invalid_argument("relay_rate: gain and power must be nonnegative");
  return std::log1p(g1 * power);
}

enum class RelayCase {
  SourceDominates,  // G_su >= max G_sr: bottleneck is the best source->relay hop
  RelaySumWeak,     // relays cannot lift the MRC SNR above G_su
  Beamform,         // a suffix of relays beamforms; G1 > G_su
};

inline const char* to_string(RelayCase c) {
  switch (c) {
    case RelayCase::SourceDominates: return "source_dominates";
    case RelayCase::RelaySumWeak: return "relay_sum_weak";
    case RelayCase::Beamform: return "beamform";
  }
  return "?";
}

/// Optimal relay-aided strategy for one (k, u) pair. Independent of the sum
/// power P; the power split scales linearly with P.
struct RelayAidedSolution {
  double effective_gain = 0.0;
  RelayCase case_id = RelayCase::SourceDominates;
  std::vector<std::size_t> sorted_order;  // relay indices, increasing G_sr
  // 1-based positions in sorted_order; set only for Beamform.
  std::optional<std::size_t> x_idx, y_idx, z_idx;
  std::vector<std::size_t> relay_set;    // relay indices (a suffix of sorted_order)
  double source_fraction = 1.0;          // P_s = source_fraction * P
  std::vector<double> relay_fractions;   // shares of (1 - source_fraction) * P, per relay_set entry

  double source_power(double power) const { return source_fraction * power; }

  /// Per-relay transmit power, indexed by relay (zeros outside relay_set).
  std::vector<double> relay_powers(double power, std::size_t num_relays) const {
    std::vector<double> p(num_relays, 0.0);
    const double relay_total = (1.0 - source_fraction) * power;
    for (std::size_t j = 0; j < relay_set.size(); ++j)
      p[relay_set[j]] = relay_total * relay_fractions[j];
    return p;
  }
};

namespace detail {

inline void validate_pair(const PerPairGains& g) {
  if (g.sr.empty()) throw std::invalid_argument("relay_aided_solution: no relays");
  if (g.sr.size() != g.ru.size())
    throw std::invalid_argument("relay_aided_solution: G_sr and G_ru sizes differ");
  auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
  if (!ok(g.su)) throw std::invalid_argument("relay_aided_solution: invalid G_su");
  for (std::size_t i = 0; i < g.sr.size(); ++i)
    if (!ok(g.sr[i]) || !ok(g.ru[i]))
      throw std::invalid_argument("relay_aided_solution: invalid relay gain");
}

inline std::vector<double> proportional_shares(const PerPairGains& g,
                                               const std::vector<std::size_t>& set) {
  double total = 0.0;
  for (auto i : set) total += g.ru[i];
  std::vector<double> f(set.size(), 1.0 / static_cast<double>(set.size()));
  if (total > 0.0)
    for (std::size_t j = 0; j < set.size(); ++j) f[j] = g.ru[set[j]] / total;
  return f;
}

}  // namespace detail

inline RelayAidedSolution relay_aided_solution(const PerPairGains& g) {
  detail::validate_pair(g);
  const std::size_t N = g.sr.size();

  RelayAidedSolution s;
  s.sorted_order.resize(N);
  std::iota(s.sorted_order.begin(), s.sorted_order.end(), std::size_t{0});
  std::stable_sort(s.sorted_order.begin(), s.sorted_order.end(),
                   [&](std::size_t a, std::size_t b) { return g.sr[a] < g.sr[b]; });
  const auto& order = s.sorted_order;
  auto sr_at = [&](std::size_t pos) { return g.sr[order[pos]]; };
  auto suffix = [&](std::size_t from) {
    return std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(from), order.end());
  };

  const double best_sr = sr_at(N - 1);
  if (g.su >= best_sr) {
    // The MRC term never binds: all power goes to the source and the best
    // source->relay hop limits the rate.
    s.case_id = RelayCase::SourceDominates;
    s.effective_gain = best_sr;
    s.relay_set = {order[N - 1]};
    s.relay_fractions = {1.0};
    s.source_fraction = 1.0;
    return s;
  }

  // T[pos] = sum of G_ru over sorted positions pos..N-1 (nonincreasing in pos).
  std::vector<double> tail(N + 1, 0.0);
  for (std::size_t pos = N; pos-- > 0;) tail[pos] = tail[pos + 1] + g.ru[order[pos]];

  std::size_t x = 0;
  while (sr_at(x) <= g.su) ++x;  // terminates: sr_at(N-1) > su

  if (tail[x] <= g.su) {
    s.case_id = RelayCase::RelaySumWeak;
    s.effective_gain = g.su;
    s.relay_set = suffix(x);
    s.relay_fractions = detail::proportional_shares(g, s.relay_set);
    s.source_fraction = 1.0;
    return s;
  }

  std::size_t y = x;
  while (y + 1 < N && tail[y + 1] > g.su) ++y;

  std::size_t z = x;
  double best = -1.0;
  for (std::size_t b = x; b <= y; ++b) {
    const double val = sr_at(b) * tail[b] / (tail[b] + sr_at(b) - g.su);
    if (val > best) {  // strict: ties keep the smaller b (larger relay set)
      best = val;
      z = b;
    }
  }

  s.case_id = RelayCase::Beamform;
  s.effective_gain = best;
  s.x_idx = x + 1;
  s.y_idx = y + 1;
  s.z_idx = z + 1;
  s.relay_set = suffix(z);
  s.relay_fractions = detail::proportional_shares(g, s.relay_set);
  s.source_fraction = tail[z] / (tail[z] + sr_at(z) - g.su);
  return s;
}

/// Maximum relay-aided rate with sum power P.
inline double relay_rate(const PerPairGains& g, double power) {
  return relay_rate_from_gain(relay_aided_solution(g).effective_gain, power);
}

/// Sum power at which the relay-aided and direct rates cross:
/// ln(1 + G1 P) >= 2 ln(1 + G_su P / 2) iff P <= 4 (G1 - G_su) / G_su^2.
///
/// Returns nullopt when G1 <= G_su (direct always at least as good) or when
/// G_su == 0 (relay always better; the threshold is unbounded).
inline std::optional<double> crossover_power(double g1, double g_su) {
  if (!(g1 >= 0.0) || !(g_su >= 0.0))
    throw std::invalid_argument("crossover_power: gains must be nonnegative");
  if (g1 <= g_su || g_su == 0.0) return std::nullopt;
  return 4.0 * (g1 - g_su) / (g_su * g_su);
}

/// Step-one results for every (k, u): direct gain and optimal relay strategy.
class EffectiveGainTable {
 public:
  EffectiveGainTable() = default;

  explicit EffectiveGainTable(const GainTable& gains)
      : K_(gains.K()), U_(gains.U()), N_(gains.N()) {
    gains.validate();
    direct_.resize(K_ * U_);
    relay_.resize(K_ * U_);
    for (std::size_t k = 0; k < K_; ++k)
      for (std::size_t u = 0; u < U_; ++u) {
        const auto pair = gains.pair(k, u);
        direct_[k * U_ + u] = pair.su;
        relay_[k * U_ + u] = relay_aided_solution(pair);
      }
  }

  /// Table built directly from (G_su, G1) values; relay strategies are
  /// placeholders with an empty relay set. Used for synthetic instances.
  static EffectiveGainTable from_gains(std::size_t K, std::size_t U,
                                       const std::vector<double>& g_su,
                                       const std::vector<double>& g1) {
    if (g_su.size() != K * U || g1.size() != K * U)
      throw std::invalid_argument("EffectiveGainTable: size mismatch");
    EffectiveGainTable t;
    t.K_ = K;
    t.U_ = U;
    t.N_ = 0;
    t.direct_ = g_su;
    t.relay_.resize(K * U);
    for (std::size_t j = 0; j < K * U; ++j) {
      if (!(g_su[j] >= 0.0) || !(g1[j] >= 0.0) || !std::isfinite(g_su[j]) || !std::isfinite(g1[j]))
        throw std::invalid_argument("EffectiveGainTable: gains must be finite and nonnegative");
      t.relay_[j].effective_gain = g1[j];
      t.relay_[j].case_id = g1[j] > g_su[j] ? RelayCase::Beamform : RelayCase::RelaySumWeak;
    }
    return t;
  }

  std::size_t K() const { return K_; }
  std::size_t U() const { return U_; }
  std::size_t N() const { return N_; }

  double direct_gain(std::size_t k, std::size_t u) const { return direct_[k * U_ + u]; }
  double relay_gain(std::size_t k, std::size_t u) const {
    return relay_[k * U_ + u].effective_gain;
  }
  const RelayAidedSolution& relay(std::size_t k, std::size_t u) const {
    return relay_[k * U_ + u];
  }

 private:
  std::size_t K_ = 0, U_ = 0, N_ = 0;
  std::vector<double> direct_;
  std::vector<RelayAidedSolution> relay_;
};

enum class Membership : unsigned char {
  DirectOnly,  // u in U_D(k)
  RelayOnly,   // u in U_R(k)
  Either,      // neither set; both modes are candidates
};

/// U_D(k) / U_R(k) membership for every (k, u) at a given total power.
class ModeSets {
 public:
  ModeSets() = default;
  ModeSets(std::size_t K, std::size_t U)
      : K_(K), U_(U), member_(K * U, Membership::Either), crossover_(K * U) {}

  std::size_t K() const { return K_; }
  std::size_t U() const { return U_; }

  Membership membership(std::size_t k, std::size_t u) const { return member_[k * U_ + u]; }
  bool in_direct_set(std::size_t k, std::size_t u) const {
    return membership(k, u) == Membership::DirectOnly;
  }
  bool in_relay_set(std::size_t k, std::size_t u) const {
    return membership(k, u) == Membership::RelayOnly;
  }
  bool admits_relay(std::size_t k, std::size_t u) const { return !in_direct_set(k, u); }
  bool admits_direct(std::size_t k, std::size_t u) const { return !in_relay_set(k, u); }
  std::optional<double> crossover(std::size_t k, std::size_t u) const {
    return crossover_[k * U_ + u];
  }

  void set(std::size_t k, std::size_t u, Membership m, std::optional<double> crossover) {
    member_[k * U_ + u] = m;
    crossover_[k * U_ + u] = crossover;
  }

 private:
  std::size_t K_ = 0, U_ = 0;
  std::vector<Membership> member_;
  std::vector<std::optional<double>> crossover_;
};

/// u in U_D(k) iff G1 <= G_su; u in U_R(k) iff G1 > G_su and Ptot <= crossover
/// (unbounded crossover when G_su = 0).
inline ModeSets classify(const EffectiveGainTable& table, double total_power) {
  if (!(total_power > 0.0)) throw std::invalid_argument("classify: total power must be positive");
  ModeSets sets(table.K(), table.U());
  for (std::size_t k = 0; k < table.K(); ++k)
    for (std::size_t u = 0; u < table.U(); ++u) {
      const double g1 = table.relay_gain(k, u);
      const double gd = table.direct_gain(k, u);
      const auto cross = crossover_power(g1, gd);
      Membership m = Membership::Either;
      if (g1 <= gd)
        m = Membership::DirectOnly;
      else if (gd == 0.0 || (cross && total_power <= *cross))
        m = Membership::RelayOnly;
      sets.set(k, u, m, cross);
    }
  return sets;
}

inline ModeSets classify(const GainTable& gains, double total_power) {
  return classify(EffectiveGainTable(gains), total_power);
}

}  // namespace dfrelay
