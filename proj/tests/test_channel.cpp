// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "dfrelay/channel.hpp"
#include "dfrelay/units.hpp"

using namespace dfrelay;

TEST(Units, DbwRoundTrip) {
  EXPECT_DOUBLE_EQ(dbw_to_watts(-30.0), 1e-3);
  EXPECT_DOUBLE_EQ(dbw_to_watts(0.0), 1.0);
  for (double x : {-47.3, -30.0, 0.0, 12.5, 35.0, 60.0}) {
    const double back = watts_to_dbw(dbw_to_watts(x));
    EXPECT_NEAR(back, x, 1e-12 * std::max(1.0, std::abs(x)));
    const double w = dbw_to_watts(x);
    EXPECT_NEAR(dbw_to_watts(watts_to_dbw(w)), w, 1e-12 * w);
  }
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs = differs || x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, NormalMoments) {
  Rng r(7);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}

TEST(PlaceDestinations, InsideRegionAndDeterministic) {
  const Region reg{-10.0, 10.0, -30.0, -10.0};
  const auto a = place_destinations(reg, 8, 123);
  const auto b = place_destinations(reg, 8, 123);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(reg.contains(a[i]));
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
  }
}

TEST(PlaceDestinations, RejectsEmptyRegion) {
  EXPECT_THROW(place_destinations({0.0, 0.0, -1.0, 1.0}, 2, 1), std::invalid_argument);
}

TEST(TapProfile, GeometricSumOfVariances) {
  TapProfile p;
  // sigma_0^2 * (1 - e^-18) / (1 - e^-3) with sigma_0^2 = 1: numeric sum check.
  double numeric = 0.0;
  for (int i = 0; i < 6; ++i) numeric += std::exp(-3.0 * i);
  EXPECT_NEAR(numeric, (1.0 - std::exp(-18.0)) / (1.0 - std::exp(-3.0)), 1e-15);

  const auto v = p.tap_variances(2.5);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 2.5, 1e-15);
  for (std::size_t i = 1; i < v.size(); ++i) {
    EXPECT_LT(v[i], v[i - 1]);
    EXPECT_NEAR(v[i] / v[i - 1], std::exp(-3.0), 1e-14);
  }
}

TEST(TapProfile, MeanGainAtReferenceDistance) {
  TapProfile p;
  EXPECT_NEAR(p.mean_gain(10.0), 1e-3, 1e-18);
  EXPECT_NEAR(p.mean_gain(20.0), 1e-3 / 8.0, 1e-18);
}

TEST(Dft, InverseRecoversTaps) {
  Rng r(5);
  std::vector<complex> taps(6);
  for (auto& t : taps) t = r.circular_gaussian(1.0);
  for (std::size_t K : {6u, 32u, 64u}) {
    const auto back = idft(dft(taps, K), taps.size());
    for (std::size_t n = 0; n < taps.size(); ++n)
      EXPECT_LT(std::abs(back[n] - taps[n]), 1e-10 * std::abs(taps[n]) + 1e-15);
  }
}

TEST(Dft, SingleTapIsFlat) {
  std::vector<complex> taps{{0.3, -0.4}};
  const auto h = dft(taps, 16);
  for (const auto& x : h) EXPECT_NEAR(std::abs(x), 0.5, 1e-15);
}

TEST(Synthesize, SingleTapFlatResponse) {
  Topology t;
  t.source = {0.0, 0.0};
  t.relays = {{0.0, -10.0}};
  t.destinations = {{10.0, 0.0}};
  TapProfile p;
  p.num_taps = 1;
  p.pathloss_exponent = 0.0;
  const auto r = synthesize_realization(t, p, 8, 77);
  for (std::size_t k = 1; k < 8; ++k)
    EXPECT_NEAR(std::abs(r.h_su(k, 0)), std::abs(r.h_su(0, 0)), 1e-14);
}

TEST(Synthesize, AttenuationThirtyDbAtTenMeters) {
  TapProfile p;
  const std::size_t K = 16;
  const int draws = 10000;
  double mean = 0.0;
  for (int d = 0; d < draws; ++d) {
    const Link l = detail::draw_link(p, 10.0, K, derive_seed(99, d));
    double s = 0.0;
    for (const auto& h : l.response) s += std::norm(h);
    mean += s / static_cast<double>(K);
  }
  mean /= draws;
  EXPECT_NEAR(mean / 1e-3, 1.0, 0.05);
}

TEST(Synthesize, ShadowingSpreadsLinkPower) {
  TapProfile p;
  p.shadowing_std_db = 8.0;
  const int draws = 4000;
  double s = 0.0, s2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    const Link l = detail::draw_link(p, 10.0, 8, derive_seed(3, d));
    double e = 0.0;
    for (const auto& h : l.taps) e += std::norm(h);
    const double db = 10.0 * std::log10(e);
    s += db;
    s2 += db * db;
  }
  const double var = s2 / draws - (s / draws) * (s / draws);
  // Shadowing adds its variance to the (6-tap) fading spread in dB.
  EXPECT_GT(std::sqrt(var), 7.0);
}

TEST(Synthesize, DeterministicPerSeed) {
  auto t = Topology::default_layout();
  t.destinations = place_destinations(t.destination_region, 4, 11);
  TapProfile p;
  const auto a = to_gains(synthesize_realization(t, p, 32, 11), 1e-3);
  const auto b = to_gains(synthesize_realization(t, p, 32, 11), 1e-3);
  const auto c = to_gains(synthesize_realization(t, p, 32, 12), 1e-3);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
}

TEST(Synthesize, RejectsBadInput) {
  auto t = Topology::default_layout();
  t.destinations = {{0.0, 0.0}};  // coincides with the source
  EXPECT_THROW(synthesize_realization(t, TapProfile{}, 32, 1), std::invalid_argument);
  t.destinations = {{0.0, -20.0}};
  EXPECT_THROW(synthesize_realization(t, TapProfile{}, 4, 1), std::invalid_argument);
}

TEST(ToGains, RatioAndValidation) {
  ChannelRealization r;
  r.K = 1;
  r.U = 2;
  r.N = 1;
  r.source_dest.resize(2);
  r.source_relay.resize(1);
  r.relay_dest.resize(2);
  r.source_dest[0].response = {complex(std::sqrt(1e-3), 0.0)};
  r.source_dest[1].response = {complex(0.0, 0.0)};
  r.source_relay[0].response = {complex(0.0, 0.02)};
  r.relay_dest[0].response = {complex(0.01, 0.0)};
  r.relay_dest[1].response = {complex(0.0, 0.0)};
  const auto g = to_gains(r, dbw_to_watts(-30.0));
  EXPECT_NEAR(g.su(0, 0), 1.0, 1e-12);
  EXPECT_EQ(g.su(0, 1), 0.0);
  EXPECT_NEAR(g.sr(0, 0), 0.4, 1e-12);
  EXPECT_NEAR(g.ru(0, 0, 0), 0.1, 1e-12);
  EXPECT_THROW(to_gains(r, 0.0), std::invalid_argument);
  EXPECT_THROW(to_gains(r, -1.0), std::invalid_argument);
}

TEST(RealizationFile, RoundTrip) {
  auto t = Topology::default_layout();
  t.destinations = place_destinations(t.destination_region, 3, 5);
  const auto r = synthesize_realization(t, TapProfile{}, 16, 5);
  std::stringstream ss;
  write_realization(ss, r);
  const auto back = read_realization(ss);
  EXPECT_TRUE(to_gains(r, 1e-3) == to_gains(back, 1e-3));
}
