// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Step two: joint assignment of destination, mode and sum power per
// subcarrier, maximizing the weighted sum rate under a total power budget.
//
// With the OFDMA indicators relaxed to time-sharing fractions the problem is
// convex (the time-shared rates are perspectives of concave rate functions)
// and is solved through its dual. For a price mu > 0 the Lagrangian
// decomposes per subcarrier; each candidate (u, mode) is worth
//
//   relay:  X = w_u ln(1 + G1 p) - mu p,          p = [w_u/mu - 1/G1]^+
//   direct: Y = 2 w_u ln(1 + G p / 2) - mu p,     p = 2 [w_u/mu - 1/G]^+
//
// and the best candidate takes the whole subcarrier, so indicators stay
// binary. The outer loop searches mu with the subgradient Ptot - P_x(mu),
// starting from the best point of a uniform grid over [mu_L, mu_U].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfrelay/ratefn.hpp"
#include "dfrelay/waterfill.hpp"

namespace dfrelay {

enum class Mode : unsigned char { RelayAided, Direct };

inline const char* to_string(Mode m) { return m == Mode::Direct ? "direct" : "relay"; }

struct SolverParams {
  double total_power = 0.0;     // W
  std::vector<double> weights;  // positive, summing to 1
  std::size_t grid_points = 100;
  double delta_factor = 1e-3;  // step = delta_factor * (mu_U - mu_L)
  double epsilon = 0.1;        // W, or a fraction of total_power when relative_epsilon
  bool relative_epsilon = false;
  std::size_t max_iters = 100000;
  double bracket_tol = 1e-12;  // relative width for root finding and bisection
  bool diminishing_step = false;
  double highpower_factor = 100.0;
  std::size_t max_doublings = 200;
  bool refine_assignment = true;  // swap search after a P_x discontinuity

  static SolverParams equal_weights(double total_power, std::size_t users) {
    SolverParams p;
    p.total_power = total_power;
    p.weights.assign(users, 1.0 / static_cast<double>(users));
    return p;
  }

  double stopping_window() const { return relative_epsilon ? epsilon * total_power : epsilon; }

  void validate(std::size_t users) const {
    if (!(total_power > 0.0) || !std::isfinite(total_power))
      throw std::invalid_argument("solver params: total_power must be positive");
    if (weights.size() != users)
      throw std::invalid_argument("solver params: one weight per destination required");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("solver params: weights must be positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("solver params: weights must sum to 1");
    if (grid_points < 2) throw std::invalid_argument("solver params: grid_points must be >= 2");
    if (!(epsilon > 0.0)) throw std::invalid_argument("solver params: epsilon must be positive");
    if (!(delta_factor > 0.0))
      throw std::invalid_argument("solver params: delta_factor must be positive");
    if (!(bracket_tol > 0.0) || bracket_tol >= 1.0)
      throw std::invalid_argument("solver params: bracket_tol must be in (0, 1)");
  }

  bool has_equal_weights() const {
    return std::all_of(weights.begin(), weights.end(),
                       [&](double w) { return std::abs(w - weights.front()) <= 1e-12; });
  }
};

inline double relay_power_at(double g1, double w, double mu) {
  return g1 > 0.0 ? std::max(w / mu - 1.0 / g1, 0.0) : 0.0;
}

inline double direct_power_at(double g, double w, double mu) {
  return g > 0.0 ? 2.0 * std::max(w / mu - 1.0 / g, 0.0) : 0.0;
}

/// max_p w ln(1 + G1 p) - mu p.
inline double relay_metric(double g1, double w, double mu) {
  const double p = relay_power_at(g1, w, mu);
  return w * std::log1p(g1 * p) - mu * p;
}

/// max_p w 2 ln(1 + G p / 2) - mu p.
inline double direct_metric(double g, double w, double mu) {
  const double p = direct_power_at(g, w, mu);
  return 2.0 * w * std::log1p(g * p / 2.0) - mu * p;
}

struct Choice {
  std::size_t user = 0;
  Mode mode = Mode::Direct;
  friend bool operator==(const Choice&, const Choice&) = default;
};

/// Lagrangian maximizer at a fixed price.
struct DualState {
  double mu = 0.0;
  std::vector<Choice> choice;  // active (u, mode) per subcarrier
  std::vector<double> power;   // sum power per subcarrier
  double px = 0.0;             // total allocated power
  double lagrangian = 0.0;
};

struct SubcarrierAssignment {
  std::size_t k = 0;
  std::size_t user = 0;
  Mode mode = Mode::Direct;
  double sum_power = 0.0;
  double source_power_broadcast = 0.0;
  double source_power_relaying = 0.0;
  std::vector<double> relay_powers;  // per relay, relaying slot
};

enum class SolveStatus {
  Converged,               // stopping window reached
  DiscontinuityResolved,   // mu located at a jump of P_x to bracket tolerance
  IterationLimit,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::DiscontinuityResolved: return "discontinuity_resolved";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

struct MuBracket {
  double lower = 0.0;  // mu_L: P_L(mu_L) = Ptot
  double upper = 0.0;  // mu_U: P_U(mu_U) = Ptot
};

struct Allocation {
  std::vector<SubcarrierAssignment> assignments;
  double wsr = 0.0;            // nats per two slots, weighted
  double mu_star = 0.0;        // final dual price
  double residual = 0.0;       // Ptot - sum of assigned powers
  double dual_residual = 0.0;  // Ptot - P_x(mu_star)
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::Converged;
  MuBracket bracket;

  bool ok() const { return status != SolveStatus::IterationLimit; }

  /// Unweighted rate delivered to each destination.
  std::vector<double> user_rates(const EffectiveGainTable& table) const {
    std::vector<double> r(table.U(), 0.0);
    for (const auto& a : assignments)
      r[a.user] += a.mode == Mode::Direct
                       ? direct_rate(table.direct_gain(a.k, a.user), a.sum_power)
                       : relay_rate_from_gain(table.relay_gain(a.k, a.user), a.sum_power);
    return r;
  }
};

struct TraceRow {
  std::size_t iteration = 0;
  double mu = 0.0;
  double px = 0.0;
  double lagrangian = 0.0;
};

using TraceSink = std::function<void(const TraceRow&)>;

/// Builds the power detail of one subcarrier.
inline SubcarrierAssignment make_assignment(const EffectiveGainTable& table, std::size_t k,
                                            Choice c, double power) {
  SubcarrierAssignment a;
  a.k = k;
  a.user = c.user;
  a.mode = c.mode;
  a.sum_power = power;
  a.relay_powers.assign(table.N(), 0.0);
  if (c.mode == Mode::Direct) {
    a.source_power_broadcast = power / 2.0;
    a.source_power_relaying = power / 2.0;
  } else {
    const auto& sol = table.relay(k, c.user);
    a.source_power_broadcast = sol.source_power(power);
    if (table.N() > 0) a.relay_powers = sol.relay_powers(power, table.N());
  }
  return a;
}

/// Weighted sum rate of an assignment list under the proposed protocol.
inline double wsr_of(std::span<const SubcarrierAssignment> assignments,
                     const std::vector<double>& weights, const EffectiveGainTable& table) {
  double f = 0.0;
  for (const auto& a : assignments) {
    const double r = a.mode == Mode::Direct
                         ? direct_rate(table.direct_gain(a.k, a.user), a.sum_power)
                         : relay_rate_from_gain(table.relay_gain(a.k, a.user), a.sum_power);
    f += weights.at(a.user) * r;
  }
  return f;
}

class DualSolver {
 public:
  DualSolver(SolverParams params, EffectiveGainTable table)
      : params_(std::move(params)), table_(std::move(table)) {
    params_.validate(table_.U());
    sets_ = classify(table_, params_.total_power);
  }

  const SolverParams& params() const { return params_; }
  const EffectiveGainTable& table() const { return table_; }
  const ModeSets& mode_sets() const { return sets_; }

  bool admissible(std::size_t k, std::size_t u, Mode mode) const {
    return mode == Mode::RelayAided ? sets_.admits_relay(k, u) : sets_.admits_direct(k, u);
  }

  /// Metric of candidate (u, mode) at subcarrier k and price mu.
  double metric(std::size_t k, std::size_t u, Mode mode, double mu) const {
    if (!(mu > 0.0)) throw std::invalid_argument("metric: mu must be positive");
    if (!admissible(k, u, mode)) throw std::invalid_argument("metric: inadmissible (u, mode)");
    const double w = params_.weights[u];
    return mode == Mode::RelayAided ? relay_metric(table_.relay_gain(k, u), w, mu)
                                    : direct_metric(table_.direct_gain(k, u), w, mu);
  }

  double power_at(std::size_t k, Choice c, double mu) const {
    const double w = params_.weights[c.user];
    return c.mode == Mode::RelayAided ? relay_power_at(table_.relay_gain(k, c.user), w, mu)
                                      : direct_power_at(table_.direct_gain(k, c.user), w, mu);
  }

  /// Lagrangian maximization at price mu. Ties go to the lowest destination
  /// index, then relay-aided before direct.
  DualState solve_lmp(double mu) const {
    if (!(mu > 0.0)) throw std::invalid_argument("solve_lmp: mu must be positive");
    DualState s;
    s.mu = mu;
    s.choice.resize(table_.K());
    s.power.resize(table_.K());
    double sum_metric = 0.0;
    for (std::size_t k = 0; k < table_.K(); ++k) {
      double best = -std::numeric_limits<double>::infinity();
      Choice arg;
      for (std::size_t u = 0; u < table_.U(); ++u)
        for (Mode m : {Mode::RelayAided, Mode::Direct}) {
          if (!admissible(k, u, m)) continue;
          const double v = metric(k, u, m, mu);
          if (v > best) {
            best = v;
            arg = {u, m};
          }
        }
      s.choice[k] = arg;
      s.power[k] = power_at(k, arg, mu);
      s.px += s.power[k];
      sum_metric += best;
    }
    s.lagrangian = sum_metric + mu * params_.total_power;
    return s;
  }

  double total_power_at(double mu) const { return solve_lmp(mu).px; }

  /// P_L(mu) = sum_k [min_u w_u / mu - vmax_k]^+.
  double lower_power_bound(double mu) const {
    const double wmin = *std::min_element(params_.weights.begin(), params_.weights.end());
    double p = 0.0;
    for (std::size_t k = 0; k < table_.K(); ++k) {
      const auto [vmin, vmax] = inverse_gain_range(k);
      if (std::isfinite(vmax)) p += std::max(wmin / mu - vmax, 0.0);
      (void)vmin;
    }
    return p;
  }

  /// P_U(mu) = sum_k [2 max_u w_u / mu - vmin_k]^+.
  double upper_power_bound(double mu) const {
    const double wmax = *std::max_element(params_.weights.begin(), params_.weights.end());
    double p = 0.0;
    for (std::size_t k = 0; k < table_.K(); ++k) {
      const auto [vmin, vmax] = inverse_gain_range(k);
      (void)vmax;
      if (std::isfinite(vmin)) p += std::max(2.0 * wmax / mu - vmin, 0.0);
    }
    return p;
  }

  /// mu_U and mu_L by geometric bisection. mu_U is returned from the side
  /// where P_U <= Ptot and mu_L from the side where P_L >= Ptot, so that
  /// P_x(mu_U) <= Ptot <= P_x(mu_L).
  MuBracket bracket_bounds() const {
    bool any = false;
    for (std::size_t k = 0; k < table_.K() && !any; ++k)
      any = std::isfinite(inverse_gain_range(k).first);
    if (!any) throw std::invalid_argument("bracket_bounds: no admissible candidate has positive gain");

    MuBracket b;
    b.upper = solve_decreasing([&](double mu) { return upper_power_bound(mu); }, false);
    b.lower = solve_decreasing([&](double mu) { return lower_power_bound(mu); }, true);
    return b;
  }

  /// Best feasible point of the uniform grid over [mu_L, mu_U); mu_U when no
  /// grid point is feasible.
  double init_mu(const MuBracket& b) const {
    if (!(b.lower <= b.upper)) throw std::invalid_argument("init_mu: mu_L > mu_U");
    const double ptot = params_.total_power;
    double best_mu = b.upper;
    double best_gap = std::numeric_limits<double>::infinity();
    const auto n_s = static_cast<double>(params_.grid_points);
    for (std::size_t n = 0; n < params_.grid_points; ++n) {
      const double mu = b.lower + static_cast<double>(n) * (b.upper - b.lower) / n_s;
      if (!(mu > 0.0)) continue;
      const double gap = ptot - total_power_at(mu);
      if (gap >= 0.0 && gap < best_gap) {
        best_gap = gap;
        best_mu = mu;
      }
    }
    return best_mu;
  }

  /// Full step-two solve: bracket, grid initialization, safeguarded
  /// subgradient iteration, then exact power completion of the final
  /// assignment.
  Allocation solve(const TraceSink& trace = {}) const {
    const double ptot = params_.total_power;
    const double window = params_.stopping_window();
    const MuBracket bracket = bracket_bounds();

    // P_x is nonincreasing in mu: feasible (P_x <= Ptot) iff mu >= mu*.
    DualState feasible = solve_lmp(bracket.upper);
    DualState infeasible = solve_lmp(bracket.lower);
    double hi = bracket.upper;
    double lo = bracket.lower;

    double mu = init_mu(bracket);
    DualState state = solve_lmp(mu);
    const double delta = params_.delta_factor * (bracket.upper - bracket.lower);

    SolveStatus status = SolveStatus::IterationLimit;
    std::size_t iter = 0;
    bool bisecting = false;
    double last_gap = ptot - state.px;
    if (trace) trace({0, state.mu, state.px, state.lagrangian});

    for (;;) {
      const double gap = ptot - state.px;
      if (gap >= 0.0 && gap < window) {
        status = SolveStatus::Converged;
        break;
      }
      if (gap >= 0.0) {
        if (state.mu <= hi) {
          hi = state.mu;
          feasible = state;
        }
      } else if (state.mu >= lo) {
        lo = state.mu;
        infeasible = state;
      }
      if (hi - lo <= params_.bracket_tol * hi) {
        status = SolveStatus::DiscontinuityResolved;
        break;
      }
      if (iter >= params_.max_iters) break;
      ++iter;

      // Constant steps overshoot once P_x is steep around mu*; after the
      // first sign change of the subgradient fall back to bisection.
      if ((gap < 0.0) != (last_gap < 0.0)) bisecting = true;
      last_gap = gap;
      double next = 0.5 * (lo + hi);
      if (!bisecting) {
        const double step =
            params_.diminishing_step ? delta / std::sqrt(static_cast<double>(iter)) : delta;
        const double cand = std::max(state.mu - step * gap, 0.0);
        if (cand > lo && cand < hi) next = cand;
      }
      state = solve_lmp(next);
      if (trace) trace({iter, state.mu, state.px, state.lagrangian});
    }

    Allocation out;
    out.bracket = bracket;
    out.iterations = iter;
    out.status = status;
    if (status == SolveStatus::Converged) {
      out.mu_star = state.mu;
      out.dual_residual = ptot - state.px;
      set_assignments(out, state.choice);
    } else {
      out.mu_star = feasible.mu;
      out.dual_residual = ptot - feasible.px;
      set_assignments(out, feasible.choice);
      if (status == SolveStatus::DiscontinuityResolved) {
        // The relaxed optimum time-shares one subcarrier between the choices
        // on either side of the jump; keep the better integral rounding.
        Allocation alt = out;
        set_assignments(alt, infeasible.choice);
        if (alt.wsr > out.wsr) {
          out.assignments = std::move(alt.assignments);
          out.wsr = alt.wsr;
          out.residual = alt.residual;
        }
        if (params_.refine_assignment) refine(out);
      }
    }
    return out;
  }

  /// Exact power split for a fixed per-subcarrier choice.
  std::vector<double> complete_powers(const std::vector<Choice>& choice) const {
    std::vector<WaterfillChannel> ch(choice.size());
    bool any = false;
    for (std::size_t k = 0; k < choice.size(); ++k) {
      const auto& c = choice[k];
      const double g = c.mode == Mode::Direct ? table_.direct_gain(k, c.user)
                                              : table_.relay_gain(k, c.user);
      ch[k] = {g, params_.weights[c.user], c.mode == Mode::Direct ? 2.0 : 1.0};
      any = any || g > 0.0;
    }
    if (!any) return std::vector<double>(choice.size(), 0.0);
    auto p = weighted_waterfill(ch, params_.total_power).powers;
    // Rounding can leave the sum a few ulps above the budget; shrink until the
    // sequential sum is within it.
    for (int pass = 0; pass < 8; ++pass) {
      double sum = 0.0;
      for (double x : p) sum += x;
      if (sum <= params_.total_power) break;
      const double f = params_.total_power / sum * (1.0 - 4.0 * std::numeric_limits<double>::epsilon() * (pass + 1));
      for (double& x : p) x *= f;
    }
    return p;
  }

  double wsr_of(std::span<const SubcarrierAssignment> assignments) const {
    return dfrelay::wsr_of(assignments, params_.weights, table_);
  }

 private:
  /// (min, max) over admissible positive-gain candidates of 1/G1 (relay) and
  /// 2/G (direct). Infinite when the subcarrier has no such candidate.
  std::pair<double, double> inverse_gain_range(std::size_t k) const {
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < table_.U(); ++u) {
      if (sets_.admits_relay(k, u) && table_.relay_gain(k, u) > 0.0) {
        const double v = 1.0 / table_.relay_gain(k, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      if (sets_.admits_direct(k, u) && table_.direct_gain(k, u) > 0.0) {
        const double v = 2.0 / table_.direct_gain(k, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    }
    if (!std::isfinite(vmin)) vmax = std::numeric_limits<double>::infinity();
    return {vmin, vmax};
  }

  /// Root of a continuous nonincreasing f(mu) = Ptot, bisected in log space.
  template <class F>
  double solve_decreasing(F&& f, bool want_lower) const {
    const double ptot = params_.total_power;
    const double wmax = *std::max_element(params_.weights.begin(), params_.weights.end());
    const double scale = wmax / ptot;
    double lo = scale * 1e-12;
    double hi = scale * 1e12;
    std::size_t n = 0;
    while (f(lo) < ptot) {
      lo *= 0.5;
      if (++n > params_.max_doublings)
        throw std::runtime_error("bracket_bounds: failed to bracket the lower root");
    }
    n = 0;
    while (f(hi) > ptot) {
      hi *= 2.0;
      if (++n > params_.max_doublings)
        throw std::runtime_error("bracket_bounds: failed to bracket the upper root");
    }
    while (hi - lo > params_.bracket_tol * hi) {
      const double mid = std::sqrt(lo * hi);
      if (mid <= lo || mid >= hi) break;
      if (f(mid) >= ptot)
        lo = mid;
      else
        hi = mid;
    }
    // f(lo) >= Ptot >= f(hi)
    return want_lower ? lo : hi;
  }

  void set_assignments(Allocation& out, const std::vector<Choice>& choice) const {
    const auto powers = complete_powers(choice);
    out.assignments.clear();
    double used = 0.0;
    for (std::size_t k = 0; k < choice.size(); ++k) {
      out.assignments.push_back(make_assignment(table_, k, choice[k], powers[k]));
      used += powers[k];
    }
    out.residual = params_.total_power - used;
    out.wsr = wsr_of(out.assignments);
  }

  /// First-improvement search over single-subcarrier choice swaps, with exact
  /// power completion for every candidate.
  void refine(Allocation& out) const {
    std::vector<Choice> choice;
    for (const auto& a : out.assignments) choice.push_back({a.user, a.mode});
    double best = out.wsr;
    bool improved = true;
    for (std::size_t pass = 0; improved && pass < 8; ++pass) {
      improved = false;
      for (std::size_t k = 0; k < choice.size(); ++k)
        for (std::size_t u = 0; u < table_.U(); ++u)
          for (Mode m : {Mode::RelayAided, Mode::Direct}) {
            const Choice c{u, m};
            if (c == choice[k] || !admissible(k, u, m)) continue;
            auto trial = choice;
            trial[k] = c;
            Allocation cand;
            set_assignments(cand, trial);
            if (cand.wsr > best * (1.0 + 1e-12)) {
              best = cand.wsr;
              choice = std::move(trial);
              out.assignments = std::move(cand.assignments);
              out.wsr = cand.wsr;
              out.residual = cand.residual;
              improved = true;
            }
          }
    }
  }

  SolverParams params_;
  EffectiveGainTable table_;
  ModeSets sets_;
};

/// Step one + step two from raw gains.
inline Allocation solve_proposed(const SolverParams& params, const GainTable& gains,
                                 const TraceSink& trace = {}) {
  return DualSolver(params, EffectiveGainTable(gains)).solve(trace);
}

}  // namespace dfrelay
