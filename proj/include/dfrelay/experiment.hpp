// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Experiment runner: JSON config ingestion, single and Monte-Carlo studies
// over synthesized channels, and deterministic emission of result tables.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dfrelay/channel.hpp"
#include "dfrelay/dualsolver.hpp"
#include "dfrelay/highpower.hpp"
#include "dfrelay/ratefn.hpp"
#include "dfrelay/reference.hpp"
#include "dfrelay/units.hpp"

namespace dfrelay {

enum class Protocol : unsigned char { Proposed, Reference, HighPower };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Proposed: return "proposed";
    case Protocol::Reference: return "reference";
    case Protocol::HighPower: return "highpower";
  }
  return "?";
}

inline std::optional<Protocol> parse_protocol(const std::string& s) {
  if (s == "proposed") return Protocol::Proposed;
  if (s == "reference") return Protocol::Reference;
  if (s == "highpower") return Protocol::HighPower;
  return std::nullopt;
}

/// Validation failure carrying one "field: message" entry per problem.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::invalid_argument(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s = "invalid config:";
    for (const auto& x : e) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> errors_;
};

/// All physical quantities are stored in linear units; the dB inputs are kept
/// only for reporting.
struct ExperimentConfig {
  std::size_t subcarriers = 32;
  std::size_t users = 4;
  double ptot_dbw = 35.0;
  double noise_dbw = -30.0;
  double total_power = dbw_to_watts(35.0);     // W
  double noise_variance = dbw_to_watts(-30.0);  // W
  std::vector<double> weights;                 // empty = equal weights
  Topology topology = Topology::default_layout();
  bool fixed_destinations = false;
  TapProfile taps;
  SolverParams solver;
  std::size_t realizations = 1;
  std::uint64_t seed = 1;
  std::vector<Protocol> protocols{Protocol::Proposed, Protocol::Reference};
  std::string output_dir = "out";

  std::size_t relays() const { return topology.relays.size(); }
  bool wants(Protocol p) const {
    return std::find(protocols.begin(), protocols.end(), p) != protocols.end();
  }
  SolverParams solver_params() const {
    SolverParams p = solver;
    p.total_power = total_power;
    p.weights = weights.empty()
                    ? std::vector<double>(users, 1.0 / static_cast<double>(users))
                    : weights;
    return p;
  }
};

namespace detail {

using json = nlohmann::json;

class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& field, const std::string& msg) {
    errors_.push_back(field + ": " + msg);
  }

  template <class T>
  void get(const json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      error(path + key, "wrong type");
    }
  }

  bool point(const json& j, const std::string& field, Point& out) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      error(field, "expected [x, y] in meters");
      return false;
    }
    out = {j[0].get<double>(), j[1].get<double>()};
    return true;
  }

 private:
  std::vector<std::string>& errors_;
};

inline void reject_unknown(const json& obj, const std::vector<std::string>& known,
                           const std::string& path, FieldReader& r) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      r.error(path + it.key(), "unknown field");
}

}  // namespace detail

/// Parses and validates a config document. Throws ConfigError listing every
/// offending field.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::json;
  std::vector<std::string> errors;
  detail::FieldReader r(errors);
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError({"<root>: expected an object"});

  detail::reject_unknown(j,
                         {"subcarriers", "users", "ptot_dbw", "noise_dbw", "weights", "topology",
                          "channel", "solver", "realizations", "seed", "protocols", "output_dir"},
                         "", r);
  r.get(j, "subcarriers", "", c.subcarriers);
  r.get(j, "users", "", c.users);
  r.get(j, "ptot_dbw", "", c.ptot_dbw);
  r.get(j, "noise_dbw", "", c.noise_dbw);
  r.get(j, "weights", "", c.weights);
  r.get(j, "realizations", "", c.realizations);
  r.get(j, "seed", "", c.seed);
  r.get(j, "output_dir", "", c.output_dir);

  if (j.contains("protocols")) {
    std::vector<std::string> names;
    r.get(j, "protocols", "", names);
    c.protocols.clear();
    for (const auto& n : names) {
      auto p = parse_protocol(n);
      if (!p)
        r.error("protocols", "unknown protocol '" + n + "'");
      else if (!c.wants(*p))
        c.protocols.push_back(*p);
    }
    if (c.protocols.empty()) r.error("protocols", "at least one protocol required");
  }

  if (j.contains("topology")) {
    const json& t = j.at("topology");
    if (!t.is_object()) {
      r.error("topology", "expected an object");
    } else {
      detail::reject_unknown(t, {"source_m", "relays_m", "destinations_m", "region_m"},
                             "topology.", r);
      if (t.contains("source_m")) r.point(t.at("source_m"), "topology.source_m", c.topology.source);
      if (t.contains("relays_m")) {
        c.topology.relays.clear();
        if (!t.at("relays_m").is_array()) r.error("topology.relays_m", "expected a list");
        else
          for (std::size_t i = 0; i < t.at("relays_m").size(); ++i) {
            Point p;
            if (r.point(t.at("relays_m")[i], "topology.relays_m[" + std::to_string(i) + "]", p))
              c.topology.relays.push_back(p);
          }
      }
      if (t.contains("destinations_m")) {
        c.fixed_destinations = true;
        if (!t.at("destinations_m").is_array()) r.error("topology.destinations_m", "expected a list");
        else
          for (std::size_t i = 0; i < t.at("destinations_m").size(); ++i) {
            Point p;
            if (r.point(t.at("destinations_m")[i],
                        "topology.destinations_m[" + std::to_string(i) + "]", p))
              c.topology.destinations.push_back(p);
          }
      }
      if (t.contains("region_m")) {
        const json& g = t.at("region_m");
        if (!g.is_object()) {
          r.error("topology.region_m", "expected an object");
        } else {
          detail::reject_unknown(g, {"x_min", "x_max", "y_min", "y_max"}, "topology.region_m.", r);
          auto& reg = c.topology.destination_region;
          r.get(g, "x_min", "topology.region_m.", reg.x_min);
          r.get(g, "x_max", "topology.region_m.", reg.x_max);
          r.get(g, "y_min", "topology.region_m.", reg.y_min);
          r.get(g, "y_max", "topology.region_m.", reg.y_max);
        }
      }
    }
  }

  if (j.contains("channel")) {
    const json& ch = j.at("channel");
    if (!ch.is_object()) {
      r.error("channel", "expected an object");
    } else {
      detail::reject_unknown(ch,
                             {"taps", "tap_decay", "pathloss_exponent", "reference_distance_m",
                              "reference_attenuation_db", "shadowing_std_db"},
                             "channel.", r);
      r.get(ch, "taps", "channel.", c.taps.num_taps);
      r.get(ch, "tap_decay", "channel.", c.taps.decay);
      r.get(ch, "pathloss_exponent", "channel.", c.taps.pathloss_exponent);
      r.get(ch, "reference_distance_m", "channel.", c.taps.reference_distance_m);
      r.get(ch, "reference_attenuation_db", "channel.", c.taps.reference_attenuation_db);
      r.get(ch, "shadowing_std_db", "channel.", c.taps.shadowing_std_db);
    }
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (!s.is_object()) {
      r.error("solver", "expected an object");
    } else {
      detail::reject_unknown(s,
                             {"grid_points", "delta_factor", "epsilon_w", "epsilon_relative",
                              "max_iters", "diminishing_step", "highpower_factor"},
                             "solver.", r);
      r.get(s, "grid_points", "solver.", c.solver.grid_points);
      r.get(s, "delta_factor", "solver.", c.solver.delta_factor);
      r.get(s, "max_iters", "solver.", c.solver.max_iters);
      r.get(s, "diminishing_step", "solver.", c.solver.diminishing_step);
      r.get(s, "highpower_factor", "solver.", c.solver.highpower_factor);
      if (s.contains("epsilon_w") && s.contains("epsilon_relative"))
        r.error("solver", "give either epsilon_w or epsilon_relative, not both");
      if (s.contains("epsilon_relative")) {
        c.solver.relative_epsilon = true;
        r.get(s, "epsilon_relative", "solver.", c.solver.epsilon);
      } else {
        r.get(s, "epsilon_w", "solver.", c.solver.epsilon);
      }
    }
  }

  // Semantic checks.
  if (c.subcarriers == 0) r.error("subcarriers", "must be >= 1");
  if (c.users == 0) r.error("users", "must be >= 1");
  if (!std::isfinite(c.ptot_dbw)) r.error("ptot_dbw", "must be finite");
  if (!std::isfinite(c.noise_dbw)) r.error("noise_dbw", "must be finite");
  if (c.realizations == 0) r.error("realizations", "must be >= 1");
  if (c.topology.relays.empty()) r.error("topology.relays_m", "at least one relay required");
  if (c.fixed_destinations && c.topology.destinations.size() != c.users)
    r.error("topology.destinations_m", "must list exactly `users` points");
  if (!c.fixed_destinations && !(c.topology.destination_region.area() > 0.0))
    r.error("topology.region_m", "must have positive area");
  if (c.subcarriers != 0 && c.subcarriers < c.taps.num_taps)
    r.error("subcarriers", "must be >= channel.taps");
  if (c.output_dir.empty()) r.error("output_dir", "must not be empty");
  if (!c.weights.empty() && c.weights.size() != c.users)
    r.error("weights", "must have one entry per user");
  try {
    c.taps.validate();
  } catch (const std::exception& e) {
    r.error("channel", e.what());
  }

  // dB -> linear, once.
  c.total_power = dbw_to_watts(c.ptot_dbw);
  c.noise_variance = dbw_to_watts(c.noise_dbw);

  if (errors.empty()) {
    try {
      const SolverParams p = c.solver_params();
      p.validate(c.users);
      if (c.wants(Protocol::Reference) && !p.has_equal_weights())
        r.error("protocols", "reference protocol requires equal weights");
    } catch (const std::exception& e) {
      r.error("weights/solver", e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open '" + path.string() + "'"});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({std::string("config: parse error: ") + e.what()});
  }
  return parse_config(j);
}

struct ProtocolResult {
  Protocol protocol = Protocol::Proposed;
  bool available = true;  // false for highpower when its conditions fail
  double wsr = 0.0;
  std::vector<double> user_rates;
  std::vector<SubcarrierAssignment> assignments;
  SolveStatus status = SolveStatus::Converged;
  double mu_star = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  double margin = 0.0;  // highpower only
};

struct RealizationResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<Point> destinations;
  std::vector<ProtocolResult> protocols;

  const ProtocolResult* find(Protocol p) const {
    for (const auto& r : protocols)
      if (r.protocol == p) return &r;
    return nullptr;
  }
};

struct CdfPoint {
  double rate = 0.0;
  double cumulative_probability = 0.0;
};

/// Per-subcarrier view of one realization, kept for the first realization.
struct GainSnapshot {
  EffectiveGainTable table;
  ModeSets sets;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<RealizationResult> realizations;
  std::optional<GainSnapshot> first;
  std::vector<TraceRow> trace;  // proposed solve of the first realization

  double average_wsr(Protocol p) const {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& r : realizations)
      if (const auto* x = r.find(p); x && x->available) {
        s += x->wsr;
        ++n;
      }
    return n ? s / static_cast<double>(n) : std::nan("");
  }

  double average_user_rate(Protocol p, std::size_t user) const {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& r : realizations)
      if (const auto* x = r.find(p); x && x->available) {
        s += x->user_rates.at(user);
        ++n;
      }
    return n ? s / static_cast<double>(n) : std::nan("");
  }

  /// Empirical CDF of the rate of `user` across realizations.
  std::vector<CdfPoint> rate_cdf(Protocol p, std::size_t user = 0) const {
    std::vector<double> v;
    for (const auto& r : realizations)
      if (const auto* x = r.find(p); x && x->available) v.push_back(x->user_rates.at(user));
    std::sort(v.begin(), v.end());
    std::vector<CdfPoint> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back({v[i], static_cast<double>(i + 1) / static_cast<double>(v.size())});
    return out;
  }

  bool any_iteration_limit() const {
    for (const auto& r : realizations)
      if (const auto* x = r.find(Protocol::Proposed); x && x->status == SolveStatus::IterationLimit)
        return true;
    return false;
  }
};

/// Channel gains of realization `index`.
inline EffectiveGainTable realization_gains(const ExperimentConfig& c, std::size_t index,
                                            std::vector<Point>* destinations = nullptr) {
  const std::uint64_t seed = derive_seed(c.seed, index);
  Topology topo = c.topology;
  if (!c.fixed_destinations)
    topo.destinations = place_destinations(topo.destination_region, c.users, seed);
  if (destinations) *destinations = topo.destinations;
  return EffectiveGainTable(
      to_gains(synthesize_realization(topo, c.taps, c.subcarriers, seed), c.noise_variance));
}

/// Runs every requested protocol on one realization.
inline RealizationResult run_realization(const ExperimentConfig& c, std::size_t index,
                                         GainSnapshot* snapshot = nullptr,
                                         const TraceSink& trace = {}) {
  RealizationResult out;
  out.index = index;
  out.seed = derive_seed(c.seed, index);
  const EffectiveGainTable table = realization_gains(c, index, &out.destinations);
  const SolverParams params = c.solver_params();

  for (Protocol p : c.protocols) {
    ProtocolResult pr;
    pr.protocol = p;
    if (p == Protocol::Proposed) {
      const DualSolver solver(params, table);
      if (snapshot) *snapshot = {table, solver.mode_sets()};
      Allocation a = solver.solve(trace);
      pr.wsr = a.wsr;
      pr.user_rates = a.user_rates(table);
      pr.status = a.status;
      pr.mu_star = a.mu_star;
      pr.residual = a.residual;
      pr.iterations = a.iterations;
      pr.assignments = std::move(a.assignments);
    } else if (p == Protocol::Reference) {
      ReferenceAllocation a = solve_reference(params, table);
      pr.wsr = a.wsr;
      pr.user_rates = a.user_rates(c.users);
      pr.mu_star = a.level;
      double used = 0.0;
      for (double x : a.powers) used += x;
      pr.residual = params.total_power - used;
      pr.assignments = std::move(a.assignments);
    } else {
      HighPowerReport rep = evaluate_highpower(params, table);
      pr.margin = rep.margin;
      pr.mu_star = rep.mu_upper;
      pr.available = rep.conditions_met;
      if (rep.allocation) {
        pr.wsr = rep.allocation->wsr;
        pr.user_rates = rep.allocation->user_rates(table);
        pr.assignments = std::move(rep.allocation->assignments);
      }
    }
    out.protocols.push_back(std::move(pr));
  }
  if (snapshot && !c.wants(Protocol::Proposed))
    *snapshot = {table, classify(table, params.total_power)};
  return out;
}

/// Monte-Carlo loop over `config.realizations` draws. Realizations are
/// distributed over `jobs` threads; results are stored by index so the report
/// does not depend on scheduling.
inline RunReport run_monte_carlo(const ExperimentConfig& c, std::size_t jobs = 1,
                                 bool keep_trace = false) {
  RunReport rep;
  rep.config = c;
  rep.realizations.resize(c.realizations);

  GainSnapshot snap;
  TraceSink sink;
  if (keep_trace) sink = [&rep](const TraceRow& t) { rep.trace.push_back(t); };
  rep.realizations[0] = run_realization(c, 0, &snap, sink);
  rep.first = std::move(snap);

  std::atomic<std::size_t> next{1};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < c.realizations; i = next++) {
      try {
        rep.realizations[i] = run_realization(c, i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, c.realizations));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rep;
}

inline RunReport run_single(const ExperimentConfig& c, bool keep_trace = false) {
  if (c.realizations != 1) throw std::invalid_argument("run_single: realizations must be 1");
  return run_monte_carlo(c, 1, keep_trace);
}

// ---- emission --------------------------------------------------------------

namespace detail {

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  return os;
}

inline const char* to_string(Membership m) {
  switch (m) {
    case Membership::DirectOnly: return "direct_only";
    case Membership::RelayOnly: return "relay_only";
    case Membership::Either: return "either";
  }
  return "?";
}

}  // namespace detail

inline void write_gains_csv(std::ostream& os, const GainSnapshot& s) {
  using detail::fmt;
  os << "k,u,G_su,G1,case,membership\n";
  for (std::size_t k = 0; k < s.table.K(); ++k)
    for (std::size_t u = 0; u < s.table.U(); ++u)
      os << k + 1 << ',' << u + 1 << ',' << fmt(s.table.direct_gain(k, u)) << ','
         << fmt(s.table.relay_gain(k, u)) << ',' << to_string(s.table.relay(k, u).case_id) << ','
         << detail::to_string(s.sets.membership(k, u)) << '\n';
}

inline void write_subcarriers_csv(std::ostream& os, const ProtocolResult& r, std::size_t relays) {
  using detail::fmt;
  os << "k,u_k,mode,P_k,P_source";
  for (std::size_t i = 0; i < relays; ++i) os << ",P_relay_" << i + 1;
  os << '\n';
  for (const auto& a : r.assignments) {
    os << a.k + 1 << ',' << a.user + 1 << ',' << to_string(a.mode) << ',' << fmt(a.sum_power) << ','
       << fmt(a.source_power_broadcast);
    for (std::size_t i = 0; i < relays; ++i)
      os << ',' << fmt(i < a.relay_powers.size() ? a.relay_powers[i] : 0.0);
    os << '\n';
  }
}

inline void write_realizations_csv(std::ostream& os, const RunReport& rep) {
  using detail::fmt;
  os << "realization,seed";
  for (Protocol p : rep.config.protocols) os << ",wsr_" << to_string(p);
  for (Protocol p : rep.config.protocols)
    for (std::size_t u = 0; u < rep.config.users; ++u)
      os << ",rate_" << to_string(p) << '_' << u + 1;
  if (rep.config.wants(Protocol::Proposed)) os << ",status_proposed";
  os << '\n';
  for (const auto& r : rep.realizations) {
    os << r.index << ',' << r.seed;
    for (const auto& x : r.protocols) os << ',' << (x.available ? fmt(x.wsr) : "");
    for (const auto& x : r.protocols)
      for (std::size_t u = 0; u < rep.config.users; ++u)
        os << ',' << (x.available ? fmt(x.user_rates.at(u)) : "");
    if (const auto* x = r.find(Protocol::Proposed)) os << ',' << to_string(x->status);
    os << '\n';
  }
}

inline void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& cdf) {
  os << "rate,cumulative_probability\n";
  for (const auto& p : cdf) os << detail::fmt(p.rate) << ',' << detail::fmt(p.cumulative_probability) << '\n';
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iteration,mu,P_x,lagrangian\n";
  for (const auto& t : trace)
    os << t.iteration << ',' << detail::fmt(t.mu) << ',' << detail::fmt(t.px) << ','
       << detail::fmt(t.lagrangian) << '\n';
}

inline nlohmann::ordered_json summary_json(const RunReport& rep) {
  const auto& c = rep.config;
  nlohmann::ordered_json s;
  s["subcarriers"] = c.subcarriers;
  s["users"] = c.users;
  s["relays"] = c.relays();
  s["ptot_dbw"] = c.ptot_dbw;
  s["noise_dbw"] = c.noise_dbw;
  s["weights"] = c.solver_params().weights;
  s["realizations"] = c.realizations;
  s["seed"] = c.seed;
  auto& prot = s["protocols"];
  prot = nlohmann::ordered_json::object();
  for (Protocol p : c.protocols) {
    nlohmann::ordered_json e;
    std::size_t available = 0;
    for (const auto& r : rep.realizations)
      if (const auto* x = r.find(p); x && x->available) ++available;
    e["available_realizations"] = available;
    if (available) {
      e["average_wsr"] = rep.average_wsr(p);
      std::vector<double> rates;
      for (std::size_t u = 0; u < c.users; ++u) rates.push_back(rep.average_user_rate(p, u));
      e["average_user_rates"] = rates;
    }
    if (p == Protocol::Proposed) {
      std::size_t conv = 0, disc = 0, lim = 0;
      for (const auto& r : rep.realizations) {
        const auto st = r.find(p)->status;
        conv += st == SolveStatus::Converged;
        disc += st == SolveStatus::DiscontinuityResolved;
        lim += st == SolveStatus::IterationLimit;
      }
      e["converged"] = conv;
      e["discontinuity_resolved"] = disc;
      e["iteration_limit"] = lim;
    }
    if (rep.realizations.size() == 1) {
      const auto* x = rep.realizations[0].find(p);
      e["wsr"] = x->available ? nlohmann::ordered_json(x->wsr) : nlohmann::ordered_json();
      e["mu"] = x->mu_star;
      e["residual_w"] = x->residual;
      if (p == Protocol::Proposed) {
        e["status"] = to_string(x->status);
        e["iterations"] = x->iterations;
      }
      if (p == Protocol::HighPower) e["margin"] = x->margin;
    }
    prot[to_string(p)] = std::move(e);
  }
  return s;
}

/// Writes the report's tables under `dir`. Only the first realization's
/// per-subcarrier detail is emitted.
inline std::vector<std::filesystem::path> emit(const RunReport& rep,
                                               const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<fs::path> written;
  auto out = [&](const std::string& name) {
    written.push_back(dir / name);
    return detail::open_out(written.back());
  };

  if (rep.first) {
    auto os = out("gains.csv");
    write_gains_csv(os, *rep.first);
  }
  for (const auto& x : rep.realizations.at(0).protocols) {
    if (!x.available) continue;
    auto os = out(std::string("subcarriers_") + to_string(x.protocol) + ".csv");
    write_subcarriers_csv(os, x, rep.config.relays());
  }
  {
    auto os = out("realizations.csv");
    write_realizations_csv(os, rep);
  }
  for (Protocol p : rep.config.protocols) {
    auto os = out(std::string("cdf_user1_") + to_string(p) + ".csv");
    write_cdf_csv(os, rep.rate_cdf(p, 0));
  }
  if (!rep.trace.empty()) {
    auto os = out("trace.csv");
    write_trace_csv(os, rep.trace);
  }
  {
    auto os = out("summary.json");
    os << summary_json(rep).dump(2) << '\n';
  }
  for (const auto& p : written)
    if (!fs::exists(p)) throw std::runtime_error("failed to write '" + p.string() + "'");
  return written;
}

}  // namespace dfrelay
