// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Baseline protocol: identical to the proposed one except that a direct-mode
// subcarrier is used in the broadcasting slot only, so both modes have rate
// ln(1 + G P) with G = G_su (direct) or G1 (relay-aided). With equal weights
// the optimum picks, per subcarrier, the destination with the largest
// max{G1, G_su} and water-fills the total power over the chosen gains.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dfrelay/dualsolver.hpp"
#include "dfrelay/waterfill.hpp"

namespace dfrelay {

struct ReferenceChoice {
  std::size_t user = 0;
  Mode mode = Mode::Direct;
  double gain = 0.0;
};

struct ReferenceAllocation {
  std::vector<ReferenceChoice> choices;
  double level = 0.0;
  std::vector<double> powers;
  double wsr = 0.0;
  std::vector<SubcarrierAssignment> assignments;

  std::vector<double> user_rates(std::size_t users) const {
    std::vector<double> r(users, 0.0);
    for (std::size_t k = 0; k < choices.size(); ++k)
      r[choices[k].user] += std::log1p(choices[k].gain * powers[k]);
    return r;
  }
};

inline std::vector<ReferenceChoice> select_per_subcarrier(const SolverParams& params,
                                                          const EffectiveGainTable& table) {
  params.validate(table.U());
  if (!params.has_equal_weights())
    throw std::invalid_argument("reference protocol: only equal weights are supported");
  std::vector<ReferenceChoice> out(table.K());
  for (std::size_t k = 0; k < table.K(); ++k) {
    double best = -1.0;
    for (std::size_t u = 0; u < table.U(); ++u) {
      const double g1 = table.relay_gain(k, u);
      const double gd = table.direct_gain(k, u);
      const double g = std::max(g1, gd);
      if (g > best) {
        best = g;
        out[k] = {u, g1 > gd ? Mode::RelayAided : Mode::Direct, g};
      }
    }
  }
  return out;
}

inline ReferenceAllocation solve_reference(const SolverParams& params,
                                           const EffectiveGainTable& table) {
  ReferenceAllocation r;
  r.choices = select_per_subcarrier(params, table);
  std::vector<double> gains;
  for (const auto& c : r.choices) gains.push_back(c.gain);
  auto wf = waterfill(gains, params.total_power);
  r.level = wf.level;
  r.powers = std::move(wf.powers);
  for (std::size_t k = 0; k < r.choices.size(); ++k) {
    const auto& c = r.choices[k];
    r.wsr += params.weights[c.user] * std::log1p(c.gain * r.powers[k]);
    auto a = make_assignment(table, k, {c.user, c.mode}, r.powers[k]);
    if (c.mode == Mode::Direct) {
      a.source_power_broadcast = r.powers[k];
      a.source_power_relaying = 0.0;
    }
    r.assignments.push_back(std::move(a));
  }
  return r;
}

}  // namespace dfrelay
