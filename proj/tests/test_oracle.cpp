// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

// Sanity checks of the brute-force helpers themselves.

#include <cmath>

#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace dfrelay;

TEST(OracleRelayGain, ZeroPower) {
  EXPECT_EQ(oracle::oracle_relay_gain({1.0, {2.0}, {3.0}}, 0.0), 0.0);
  EXPECT_THROW(oracle::oracle_relay_gain({1.0, {2.0}, {3.0}}, 1.0, 10), std::invalid_argument);
}

TEST(OracleRelayGain, SingleRelayCrossingPoint) {
  // G_su = 0: 3 Psi = 1 (1 - Psi) at Psi = 1/4, SNR 0.75.
  EXPECT_NEAR(oracle::oracle_relay_gain({0.0, {3.0}, {1.0}}, 1.0), 0.75, 1e-8);
  EXPECT_NEAR(oracle::oracle_relay_gain({0.0, {3.0}, {1.0}}, 4.0), 3.0, 1e-7);
}

TEST(OracleSplit, RandomSplitsNeverBeatProportional) {
  Rng rng(6);
  for (int t = 0; t < 3; ++t) {
    const auto g = gen::pair(rng, 4);
    EXPECT_TRUE(oracle::oracle_split_optimality(g, 2.0, 0xF, 2000, 100 + t));
  }
  EXPECT_TRUE(oracle::oracle_split_optimality({0.0, {1.0, 1.0}, {2.0, 2.0}}, 1.0, 3, 500, 1));
  EXPECT_NEAR(oracle::proportional_beta({0.0, {1.0, 1.0}, {2.0, 2.0}}, 3)[0], 0.5, 1e-15);
  EXPECT_TRUE(oracle::oracle_split_optimality({0.0, {1.0, 1.0}, {2.0, 2.0}}, 1.0, 1, 50, 1));
}

TEST(OracleGlobal, SingleUserDirect) {
  GainTable g(1, 1, 1);
  g.su(0, 0) = 1.5;
  g.sr(0, 0) = 0.1;
  g.ru(0, 0, 0) = 0.1;
  EXPECT_NEAR(oracle::oracle_global_wsr({1.0}, 3.0, g), 2.0 * std::log1p(1.5 * 3.0 / 2.0), 1e-12);
}

TEST(OracleGlobal, MonotoneInPower) {
  Rng rng(8);
  const auto g = gen::table(rng, 2, 2, 2, -1.0, 1.0);
  double prev = 0.0;
  for (double p : {0.1, 0.5, 1.0, 4.0, 10.0}) {
    const double v = oracle::oracle_global_wsr({0.5, 0.5}, p, g, 100);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(OracleGlobal, RejectsLargeInstances) {
  GainTable g(4, 1, 1);
  EXPECT_THROW(oracle::oracle_global_wsr({1.0}, 1.0, g), std::invalid_argument);
  GainTable h(1, 3, 1);
  EXPECT_THROW(oracle::oracle_global_wsr({0.3, 0.3, 0.4}, 1.0, h), std::invalid_argument);
}
