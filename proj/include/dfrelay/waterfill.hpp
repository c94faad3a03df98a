// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace dfrelay {

/// One parallel channel of a weighted water-filling problem. At water level t
/// the channel receives scale * [weight * t - 1/gain]^+.
///
/// This is the KKT solution of max sum_k weight_k * scale_k * ln(1 + gain_k * p_k / scale_k)
/// subject to sum_k p_k = total. scale = 1 is the single-slot rate ln(1 + g p),
/// scale = 2 the equal-split two-slot rate 2 ln(1 + g p / 2).
struct WaterfillChannel {
  double gain = 0.0;
  double weight = 1.0;
  double scale = 1.0;
};

struct WaterfillResult {
  double level = 0.0;
  std::vector<double> powers;
};

/// Exact water level by sorting channels on their activation threshold
/// 1 / (weight * gain). Channels with zero gain or weight receive nothing.
inline WaterfillResult weighted_waterfill(std::span<const WaterfillChannel> channels,
                                          double total) {
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::invalid_argument("waterfill: total power must be positive");

  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const auto& c = channels[k];
    if (!(c.gain >= 0.0) || !(c.weight >= 0.0) || !(c.scale > 0.0) || !std::isfinite(c.gain))
      throw std::invalid_argument("waterfill: invalid channel");
    if (c.gain > 0.0 && c.weight > 0.0) active.push_back(k);
  }
  if (active.empty()) throw std::invalid_argument("waterfill: all channel gains are zero");

  auto threshold = [&](std::size_t k) { return 1.0 / (channels[k].weight * channels[k].gain); };
  std::stable_sort(active.begin(), active.end(),
                   [&](std::size_t a, std::size_t b) { return threshold(a) < threshold(b); });

  // Grow the active set until the level no longer reaches the next threshold.
  double inv_sum = 0.0;     // sum scale / gain
  double weight_sum = 0.0;  // sum scale * weight
  double level = 0.0;
  std::size_t m = 0;
  for (; m < active.size(); ++m) {
    const auto& c = channels[active[m]];
    inv_sum += c.scale / c.gain;
    weight_sum += c.scale * c.weight;
    level = (total + inv_sum) / weight_sum;
    if (m + 1 == active.size() || level <= threshold(active[m + 1])) break;
  }

  WaterfillResult out;
  out.level = level;
  out.powers.assign(channels.size(), 0.0);
  for (std::size_t j = 0; j <= m && j < active.size(); ++j) {
    const auto& c = channels[active[j]];
    out.powers[active[j]] = std::max(0.0, c.scale * (c.weight * level - 1.0 / c.gain));
  }
  return out;
}

/// Classic water-filling: p_k = [level - 1/g_k]^+ with sum p_k = total.
inline WaterfillResult waterfill(std::span<const double> gains, double total) {
  std::vector<WaterfillChannel> ch;
  ch.reserve(gains.size());
  for (double g : gains) ch.push_back({g, 1.0, 1.0});
  return weighted_waterfill(ch, total);
}

}  // namespace dfrelay
