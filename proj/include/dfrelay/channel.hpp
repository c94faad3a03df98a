// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Frequency-selective channel synthesis for the source / relay / destination
// topology, and conversion to noise-normalized per-subcarrier gains.
//
// Every link is a tapped delay line whose i-th tap is a zero-mean circular
// Gaussian with variance proportional to exp(-decay * i). Tap variances are
// normalized so that their sum equals the mean path gain of the link,
// 10^(-A/10) * (d / d_ref)^(-exponent), optionally scaled by a log-normal
// shadowing factor drawn once per link. The frequency response at subcarrier
// k is the K-point DFT of the zero-padded tap vector:
//
//   H(k) = sum_n h[n] exp(-j 2 pi n k / K)

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfrelay/random.hpp"
#include "dfrelay/units.hpp"

namespace dfrelay {

using complex = std::complex<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned rectangle, meters.
struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool contains(Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct Topology {
  Point source;
  std::vector<Point> relays;
  std::vector<Point> destinations;
  Region destination_region;

  std::size_t num_relays() const { return relays.size(); }
  std::size_t num_destinations() const { return destinations.size(); }

  /// Four relays on the line y = -5 m, destinations drawn from the 20 m x 20 m
  /// square below them.
  static Topology default_layout() {
    Topology t;
    t.source = {0.0, 0.0};
    t.relays = {{-15.0, -5.0}, {-5.0, -5.0}, {5.0, -5.0}, {15.0, -5.0}};
    t.destination_region = {-10.0, 10.0, -30.0, -10.0};
    return t;
  }

  void validate() const {
    if (relays.empty()) throw std::invalid_argument("topology: at least one relay required");
    if (destinations.empty())
      throw std::invalid_argument("topology: at least one destination required");
    auto finite = [](Point p) { return std::isfinite(p.x) && std::isfinite(p.y); };
    if (!finite(source)) throw std::invalid_argument("topology: non-finite source position");
    for (const auto& p : relays)
      if (!finite(p)) throw std::invalid_argument("topology: non-finite relay position");
    for (const auto& p : destinations)
      if (!finite(p)) throw std::invalid_argument("topology: non-finite destination position");
  }
};

/// Tapped-delay-line power profile and large-scale attenuation model.
struct TapProfile {
  std::size_t num_taps = 6;
  double decay = 3.0;  // sigma_i^2 proportional to exp(-decay * i)
  double pathloss_exponent = 3.0;
  double reference_distance_m = 10.0;
  double reference_attenuation_db = 30.0;  // mean attenuation at the reference distance
  double shadowing_std_db = 0.0;           // 0 disables shadowing

  void validate() const {
    if (num_taps == 0) throw std::invalid_argument("tap profile: num_taps must be >= 1");
    if (!(decay > 0.0) || !std::isfinite(decay))
      throw std::invalid_argument("tap profile: decay must be positive");
    if (!std::isfinite(pathloss_exponent) || pathloss_exponent < 0.0)
      throw std::invalid_argument("tap profile: pathloss_exponent must be >= 0");
    if (!(reference_distance_m > 0.0))
      throw std::invalid_argument("tap profile: reference_distance_m must be positive");
    if (!std::isfinite(reference_attenuation_db))
      throw std::invalid_argument("tap profile: reference_attenuation_db must be finite");
    if (!(shadowing_std_db >= 0.0))
      throw std::invalid_argument("tap profile: shadowing_std_db must be >= 0");
  }

  /// Mean power gain of a link of length d (no shadowing).
  double mean_gain(double d) const {
    return db_to_linear(-reference_attenuation_db) *
           std::pow(d / reference_distance_m, -pathloss_exponent);
  }

  /// Per-tap variances summing to `total`, strictly decreasing.
  std::vector<double> tap_variances(double total) const {
    std::vector<double> v(num_taps);
    double sum = 0.0;
    for (std::size_t i = 0; i < num_taps; ++i) {
      v[i] = std::exp(-decay * static_cast<double>(i));
      sum += v[i];
    }
    for (auto& x : v) x *= total / sum;
    return v;
  }
};

struct Link {
  std::vector<complex> taps;      // length num_taps (empty for replayed realizations)
  std::vector<complex> response;  // length K
};

/// Complex frequency responses of every link at K subcarriers.
///
/// relay_dest is indexed [relay * U + destination].
struct ChannelRealization {
  std::size_t K = 0;
  std::size_t U = 0;
  std::size_t N = 0;
  std::vector<Link> source_dest;
  std::vector<Link> source_relay;
  std::vector<Link> relay_dest;

  complex h_su(std::size_t k, std::size_t u) const { return source_dest[u].response[k]; }
  complex h_sr(std::size_t k, std::size_t i) const { return source_relay[i].response[k]; }
  complex h_ru(std::size_t k, std::size_t i, std::size_t u) const {
    return relay_dest[i * U + u].response[k];
  }
};

/// K-point DFT of a zero-padded tap vector.
inline std::vector<complex> dft(const std::vector<complex>& taps, std::size_t K) {
  std::vector<complex> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    complex acc{0.0, 0.0};
    for (std::size_t n = 0; n < taps.size(); ++n) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((n * k) % K) /
                           static_cast<double>(K);
      acc += taps[n] * complex{std::cos(phase), std::sin(phase)};
    }
    out[k] = acc;
  }
  return out;
}

/// Inverse of dft(); returns the first `num_taps` time-domain samples.
inline std::vector<complex> idft(const std::vector<complex>& response, std::size_t num_taps) {
  const std::size_t K = response.size();
  std::vector<complex> out(num_taps);
  for (std::size_t n = 0; n < num_taps; ++n) {
    complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < K; ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((n * k) % K) /
                           static_cast<double>(K);
      acc += response[k] * complex{std::cos(phase), std::sin(phase)};
    }
    out[n] = acc / static_cast<double>(K);
  }
  return out;
}

/// U i.i.d. uniform points in `region`. Deterministic for a fixed seed.
inline std::vector<Point> place_destinations(const Region& region, std::size_t U,
                                             std::uint64_t seed) {
  if (!(region.area() > 0.0) || !std::isfinite(region.area()))
    throw std::invalid_argument("place_destinations: region must have positive area");
  if (U == 0) throw std::invalid_argument("place_destinations: U must be >= 1");
  Rng rng(derive_seed(seed, 0));
  std::vector<Point> pts(U);
  for (auto& p : pts) {
    p.x = rng.uniform(region.x_min, region.x_max);
    p.y = rng.uniform(region.y_min, region.y_max);
  }
  return pts;
}

namespace detail {

inline Link draw_link(const TapProfile& profile, double d, std::size_t K, std::uint64_t seed) {
  Rng rng(seed);
  // The shadowing draw is always consumed so the tap stream layout does not
  // depend on the shadowing setting.
  const double shadow_db = profile.shadowing_std_db * rng.normal();
  const double total = profile.mean_gain(d) * db_to_linear(shadow_db);
  Link link;
  link.taps.reserve(profile.num_taps);
  for (double var : profile.tap_variances(total)) link.taps.push_back(rng.circular_gaussian(var));
  link.response = dft(link.taps, K);
  return link;
}

}  // namespace detail

/// Draws one realization of every link. Link streams are indexed
/// source->dest (0..U-1), source->relay (U..U+N-1), relay i->dest u
/// (U+N+i*U+u); stream s uses derive_seed(seed, s + 1).
inline ChannelRealization synthesize_realization(const Topology& topology,
                                                 const TapProfile& profile, std::size_t K,
                                                 std::uint64_t seed) {
  topology.validate();
  profile.validate();
  if (K < profile.num_taps)
    throw std::invalid_argument("synthesize_realization: K must be >= num_taps");

  const std::size_t U = topology.num_destinations();
  const std::size_t N = topology.num_relays();
  auto checked = [](Point a, Point b) {
    const double d = distance(a, b);
    if (!(d > 0.0)) throw std::invalid_argument("synthesize_realization: coincident nodes");
    return d;
  };

  ChannelRealization r;
  r.K = K;
  r.U = U;
  r.N = N;
  std::uint64_t stream = 1;
  for (std::size_t u = 0; u < U; ++u)
    r.source_dest.push_back(detail::draw_link(
        profile, checked(topology.source, topology.destinations[u]), K, derive_seed(seed, stream++)));
  for (std::size_t i = 0; i < N; ++i)
    r.source_relay.push_back(detail::draw_link(
        profile, checked(topology.source, topology.relays[i]), K, derive_seed(seed, stream++)));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t u = 0; u < U; ++u)
      r.relay_dest.push_back(detail::draw_link(
          profile, checked(topology.relays[i], topology.destinations[u]), K,
          derive_seed(seed, stream++)));
  return r;
}

/// Gains of one (subcarrier, destination) pair, noise-normalized (1/W).
struct PerPairGains {
  double su = 0.0;
  std::vector<double> sr;
  std::vector<double> ru;
};

/// Noise-normalized channel gains |H|^2 / sigma^2 for every subcarrier.
class GainTable {
 public:
  GainTable() = default;
  GainTable(std::size_t K, std::size_t U, std::size_t N, double noise_variance = 1.0)
      : K_(K), U_(U), N_(N), noise_(noise_variance), su_(K * U), sr_(K * N), ru_(K * N * U) {}

  std::size_t K() const { return K_; }
  std::size_t U() const { return U_; }
  std::size_t N() const { return N_; }
  double noise_variance() const { return noise_; }

  double& su(std::size_t k, std::size_t u) { return su_[k * U_ + u]; }
  double su(std::size_t k, std::size_t u) const { return su_[k * U_ + u]; }
  double& sr(std::size_t k, std::size_t i) { return sr_[k * N_ + i]; }
  double sr(std::size_t k, std::size_t i) const { return sr_[k * N_ + i]; }
  double& ru(std::size_t k, std::size_t i, std::size_t u) { return ru_[(k * N_ + i) * U_ + u]; }
  double ru(std::size_t k, std::size_t i, std::size_t u) const {
    return ru_[(k * N_ + i) * U_ + u];
  }

  PerPairGains pair(std::size_t k, std::size_t u) const {
    PerPairGains g;
    g.su = su(k, u);
    g.sr.resize(N_);
    g.ru.resize(N_);
    for (std::size_t i = 0; i < N_; ++i) {
      g.sr[i] = sr(k, i);
      g.ru[i] = ru(k, i, u);
    }
    return g;
  }

  void validate() const {
    if (K_ == 0 || U_ == 0 || N_ == 0)
      throw std::invalid_argument("gain table: K, U and N must be >= 1");
    auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
    for (double x : su_)
      if (!ok(x)) throw std::invalid_argument("gain table: invalid source->destination gain");
    for (double x : sr_)
      if (!ok(x)) throw std::invalid_argument("gain table: invalid source->relay gain");
    for (double x : ru_)
      if (!ok(x)) throw std::invalid_argument("gain table: invalid relay->destination gain");
  }

  friend bool operator==(const GainTable&, const GainTable&) = default;

 private:
  std::size_t K_ = 0, U_ = 0, N_ = 0;
  double noise_ = 1.0;
  std::vector<double> su_, sr_, ru_;
};

inline GainTable to_gains(const ChannelRealization& r, double noise_variance) {
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw std::invalid_argument("to_gains: noise variance must be positive");
  GainTable g(r.K, r.U, r.N, noise_variance);
  for (std::size_t k = 0; k < r.K; ++k) {
    for (std::size_t u = 0; u < r.U; ++u) g.su(k, u) = std::norm(r.h_su(k, u)) / noise_variance;
    for (std::size_t i = 0; i < r.N; ++i) {
      g.sr(k, i) = std::norm(r.h_sr(k, i)) / noise_variance;
      for (std::size_t u = 0; u < r.U; ++u)
        g.ru(k, i, u) = std::norm(r.h_ru(k, i, u)) / noise_variance;
    }
  }
  return g;
}

// Realization text format: one header line, then one row per subcarrier.
// Columns: k, then (re, im) for su_<u>, sr_<i>, ru_<i>_<u> (1-based indices),
// in that order.

inline void write_realization(std::ostream& os, const ChannelRealization& r) {
  os << "k";
  for (std::size_t u = 0; u < r.U; ++u) os << ",su_" << u + 1 << "_re,su_" << u + 1 << "_im";
  for (std::size_t i = 0; i < r.N; ++i) os << ",sr_" << i + 1 << "_re,sr_" << i + 1 << "_im";
  for (std::size_t i = 0; i < r.N; ++i)
    for (std::size_t u = 0; u < r.U; ++u)
      os << ",ru_" << i + 1 << "_" << u + 1 << "_re,ru_" << i + 1 << "_" << u + 1 << "_im";
  os << "\n";
  char buf[64];
  auto put = [&](complex z) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", z.real(), z.imag());
    os << buf;
  };
  for (std::size_t k = 0; k < r.K; ++k) {
    os << k;
    for (std::size_t u = 0; u < r.U; ++u) put(r.h_su(k, u));
    for (std::size_t i = 0; i < r.N; ++i) put(r.h_sr(k, i));
    for (std::size_t i = 0; i < r.N; ++i)
      for (std::size_t u = 0; u < r.U; ++u) put(r.h_ru(k, i, u));
    os << "\n";
  }
}

/// Reads a file written by write_realization(). Taps are not stored in the
/// file, so the returned links carry frequency responses only.
inline ChannelRealization read_realization(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("realization: empty input");
  std::size_t U = 0, N = 0, cols = 0;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) {
      ++cols;
      if (col.starts_with("su_") && col.ends_with("_re")) ++U;
      if (col.starts_with("sr_") && col.ends_with("_re")) ++N;
    }
  }
  if (U == 0 || N == 0 || cols != 1 + 2 * (U + N + N * U))
    throw std::runtime_error("realization: malformed header");

  ChannelRealization r;
  r.U = U;
  r.N = N;
  r.source_dest.resize(U);
  r.source_relay.resize(N);
  r.relay_dest.resize(N * U);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != cols) throw std::runtime_error("realization: malformed row");
    if (static_cast<std::size_t>(vals[0]) != r.K)
      throw std::runtime_error("realization: rows out of order");
    std::size_t c = 1;
    auto take = [&](Link& l) {
      l.response.emplace_back(vals[c], vals[c + 1]);
      c += 2;
    };
    for (auto& l : r.source_dest) take(l);
    for (auto& l : r.source_relay) take(l);
    for (auto& l : r.relay_dest) take(l);
    ++r.K;
  }
  if (r.K == 0) throw std::runtime_error("realization: no subcarrier rows");
  return r;
}

}  // namespace dfrelay
