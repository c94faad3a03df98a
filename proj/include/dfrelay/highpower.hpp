// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Closed-form step-two allocation when the total power is so high that, for
// every subcarrier, min_u w_u / mu_U dominates both the inverse gains and the
// gains themselves. Every sum power is then large enough that
// w R_D(P) ~ 2 w ln P and w R_R(P) ~ w ln P, so the direct mode wins
// everywhere and the power is spread uniformly.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>

#include "dfrelay/dualsolver.hpp"

namespace dfrelay {

struct HighPowerReport {
  bool conditions_met = false;
  double margin = 0.0;  // (min_u w_u / mu_U) / max_{k,u} max{1/G1, 1/G, G1, G}
  double mu_upper = 0.0;
  std::optional<Allocation> allocation;
};

/// "Much greater than" is read as margin >= factor.
inline HighPowerReport check_conditions(const SolverParams& params,
                                        const EffectiveGainTable& table, double mu_upper,
                                        double factor) {
  if (!(mu_upper > 0.0)) throw std::invalid_argument("check_conditions: mu_U must be positive");
  const double wmin = *std::min_element(params.weights.begin(), params.weights.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < table.K(); ++k)
    for (std::size_t u = 0; u < table.U(); ++u) {
      const double g1 = table.relay_gain(k, u);
      const double g = table.direct_gain(k, u);
      const double inv = std::max(g1 > 0.0 ? 1.0 / g1 : std::numeric_limits<double>::infinity(),
                                  g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity());
      worst = std::max({worst, inv, g1, g});
    }
  HighPowerReport r;
  r.mu_upper = mu_upper;
  r.margin = (wmin / mu_upper) / worst;
  r.conditions_met = r.margin >= factor;
  return r;
}

/// Direct mode on every subcarrier with P_k = Ptot / K. Equal weights pick the
/// destination with the largest G_su(k); otherwise every subcarrier goes to
/// the largest-weight destination (lowest index on ties).
inline Allocation highpower_allocation(const SolverParams& params,
                                       const EffectiveGainTable& table) {
  params.validate(table.U());
  const bool equal = params.has_equal_weights();
  const auto top_weight = static_cast<std::size_t>(
      std::max_element(params.weights.begin(), params.weights.end()) - params.weights.begin());
  const double pk = params.total_power / static_cast<double>(table.K());

  Allocation out;
  for (std::size_t k = 0; k < table.K(); ++k) {
    std::size_t user = top_weight;
    if (equal) {
      user = 0;
      for (std::size_t u = 1; u < table.U(); ++u)
        if (table.direct_gain(k, u) > table.direct_gain(k, user)) user = u;
    }
    out.assignments.push_back(make_assignment(table, k, {user, Mode::Direct}, pk));
  }
  out.wsr = wsr_of(out.assignments, params.weights, table);
  out.residual = 0.0;
  return out;
}

/// Checks the regime conditions and, when they hold, returns the closed form.
inline HighPowerReport evaluate_highpower(const SolverParams& params,
                                          const EffectiveGainTable& table) {
  const DualSolver solver(params, table);
  const MuBracket b = solver.bracket_bounds();
  HighPowerReport r = check_conditions(params, table, b.upper, params.highpower_factor);
  if (r.conditions_met) {
    r.allocation = highpower_allocation(params, table);
    r.allocation->bracket = b;
  }
  return r;
}

/// Closed-form allocation; rejected when the regime conditions do not hold.
inline Allocation solve_highpower(const SolverParams& params, const EffectiveGainTable& table) {
  auto r = evaluate_highpower(params, table);
  if (!r.conditions_met)
    throw std::invalid_argument("solve_highpower: high-power conditions not met");
  return *std::move(r.allocation);
}

}  // namespace dfrelay
