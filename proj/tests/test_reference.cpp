// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "dfrelay/dualsolver.hpp"
#include "dfrelay/reference.hpp"
#include "dfrelay/waterfill.hpp"
#include "support/generators.hpp"

using namespace dfrelay;

namespace {

void expect_kkt(const std::vector<double>& g, double total, const WaterfillResult& r) {
  const double sum = std::accumulate(r.powers.begin(), r.powers.end(), 0.0);
  EXPECT_NEAR(sum, total, 1e-10 * total);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] == 0.0) {
      EXPECT_EQ(r.powers[k], 0.0);
    } else if (r.powers[k] > 0.0) {
      EXPECT_NEAR(r.level - 1.0 / g[k], r.powers[k], 1e-10 * std::max(1.0, r.level));
    } else {
      EXPECT_LE(r.level, 1.0 / g[k] * (1 + 1e-12));
    }
  }
}

}  // namespace

TEST(Waterfill, SymmetricSplit) {
  const std::vector<double> g{1.0, 1.0};
  const auto r = waterfill(g, 2.0);
  EXPECT_NEAR(r.powers[0], 1.0, 1e-15);
  EXPECT_NEAR(r.powers[1], 1.0, 1e-15);
}

TEST(Waterfill, TwoChannelExample) {
  // [l - 1]^+ + [l - 0.25]^+ = 1  =>  2 l - 1.25 = 1  =>  l = 1.125.
  const std::vector<double> g{1.0, 4.0};
  const auto r = waterfill(g, 1.0);
  EXPECT_NEAR(r.level, 1.125, 1e-12);
  EXPECT_NEAR(r.powers[0], 0.125, 1e-12);
  EXPECT_NEAR(r.powers[1], 0.875, 1e-12);
}

TEST(Waterfill, TinyPowerGoesToBestChannel) {
  const std::vector<double> g{1e-6, 1.0};
  const auto r = waterfill(g, 1e-3);
  EXPECT_EQ(r.powers[0], 0.0);
  EXPECT_NEAR(r.powers[1], 1e-3, 1e-15);
}

TEST(Waterfill, Errors) {
  const std::vector<double> z{0.0, 0.0};
  EXPECT_THROW(waterfill(z, 1.0), std::invalid_argument);
  const std::vector<double> g{1.0};
  EXPECT_THROW(waterfill(g, 0.0), std::invalid_argument);
  const std::vector<double> bad{-1.0};
  EXPECT_THROW(waterfill(bad, 1.0), std::invalid_argument);
}

TEST(Waterfill, KktOnRandomVectors) {
  Rng rng(10);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t K = gen::count(rng, 1, 40);
    std::vector<double> g(K);
    for (auto& x : g) x = gen::gain(rng, -3.0, 3.0, 0.05);
    if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) g[0] = 1.0;
    const double total = gen::gain(rng, -3.0, 4.0);
    expect_kkt(g, total, waterfill(g, total));
  }
}

TEST(Waterfill, WeightedScaledKkt) {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const std::size_t K = gen::count(rng, 1, 20);
    std::vector<WaterfillChannel> ch(K);
    for (auto& c : ch) c = {gen::gain(rng), 0.05 + rng.uniform(), rng.uniform() < 0.5 ? 1.0 : 2.0};
    const double total = gen::gain(rng, -2.0, 3.0);
    const auto r = weighted_waterfill(ch, total);
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto& c = ch[k];
      sum += r.powers[k];
      // Marginal weighted rate w g / (1 + g p / s) equals 1/level when active.
      const double marginal = c.weight * c.gain / (1.0 + c.gain * r.powers[k] / c.scale);
      if (r.powers[k] > 0.0)
        EXPECT_NEAR(marginal * r.level, 1.0, 1e-9);
      else
        EXPECT_LE(marginal * r.level, 1.0 + 1e-9);
    }
    EXPECT_NEAR(sum, total, 1e-10 * total);
  }
}

TEST(Reference, SelectionRule) {
  // Subcarrier 0: user 1 wins through the direct link. Subcarrier 1: user 0
  // wins through relaying.
  const auto t = EffectiveGainTable::from_gains(2, 2, {1.0, 2.5, 0.5, 0.2}, {0.3, 0.1, 3.0, 1.0});
  const auto p = SolverParams::equal_weights(10.0, 2);
  const auto c = select_per_subcarrier(p, t);
  EXPECT_EQ(c[0].user, 1u);
  EXPECT_EQ(c[0].mode, Mode::Direct);
  EXPECT_DOUBLE_EQ(c[0].gain, 2.5);
  EXPECT_EQ(c[1].user, 0u);
  EXPECT_EQ(c[1].mode, Mode::RelayAided);
  EXPECT_DOUBLE_EQ(c[1].gain, 3.0);
}

TEST(Reference, TiesGoToLowestIndex) {
  const auto t = EffectiveGainTable::from_gains(1, 3, {1.0, 2.0, 2.0}, {0.0, 0.0, 0.0});
  const auto c = select_per_subcarrier(SolverParams::equal_weights(1.0, 3), t);
  EXPECT_EQ(c[0].user, 1u);
}

TEST(Reference, RelayRateIsSingleSlot) {
  const auto t = EffectiveGainTable::from_gains(1, 1, {1.0}, {3.0});
  const auto r = solve_reference(SolverParams::equal_weights(2.0, 1), t);
  EXPECT_EQ(r.choices[0].mode, Mode::RelayAided);
  EXPECT_NEAR(r.wsr, std::log(7.0), 1e-14);
  // Direct winner also uses ln(1 + G P), with all power in the first slot.
  const auto d = EffectiveGainTable::from_gains(1, 1, {3.0}, {1.0});
  const auto rd = solve_reference(SolverParams::equal_weights(2.0, 1), d);
  EXPECT_NEAR(rd.wsr, std::log(7.0), 1e-14);
  EXPECT_EQ(rd.assignments[0].source_power_relaying, 0.0);
  EXPECT_NEAR(rd.assignments[0].source_power_broadcast, 2.0, 1e-15);
}

TEST(Reference, DominatedInstance) {
  Rng rng(3);
  std::vector<double> su(6 * 3), g1(6 * 3);
  for (std::size_t k = 0; k < 6; ++k)
    for (std::size_t u = 0; u < 3; ++u) {
      su[k * 3 + u] = u == 2 ? 10.0 + rng.uniform() : rng.uniform();
      g1[k * 3 + u] = rng.uniform();
    }
  const auto r = solve_reference(SolverParams::equal_weights(5.0, 3),
                                 EffectiveGainTable::from_gains(6, 3, su, g1));
  for (const auto& c : r.choices) EXPECT_EQ(c.user, 2u);
}

TEST(Reference, EqualGainsUniformPower) {
  const auto t = EffectiveGainTable::from_gains(4, 1, {0.7, 0.7, 0.7, 0.7}, {0.2, 0.2, 0.2, 0.2});
  const auto r = solve_reference(SolverParams::equal_weights(8.0, 1), t);
  for (double p : r.powers) EXPECT_NEAR(p, 2.0, 1e-14);
}

TEST(Reference, RejectsUnequalWeights) {
  const auto t = EffectiveGainTable::from_gains(1, 2, {1.0, 1.0}, {1.0, 1.0});
  SolverParams p;
  p.total_power = 1.0;
  p.weights = {0.7, 0.3};
  EXPECT_THROW(select_per_subcarrier(p, t), std::invalid_argument);
}

TEST(Reference, PowersAreWaterFilled) {
  Rng rng(12);
  for (int n = 0; n < 50; ++n) {
    const auto gt = gen::table(rng, 16, 3, 2);
    const EffectiveGainTable t(gt);
    const double ptot = gen::gain(rng, 0.0, 3.0);
    const auto r = solve_reference(SolverParams::equal_weights(ptot, 3), t);
    std::vector<double> g;
    for (const auto& c : r.choices) g.push_back(c.gain);
    expect_kkt(g, ptot, {r.level, r.powers});
    for (std::size_t k = 0; k < r.choices.size(); ++k) {
      const auto& c = r.choices[k];
      EXPECT_EQ(c.mode == Mode::RelayAided, t.relay_gain(k, c.user) > t.direct_gain(k, c.user));
    }
  }
}
