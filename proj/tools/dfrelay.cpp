// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

// dfrelay: run a resource-allocation experiment described by a JSON config.
//
// Exit codes: 0 success, 1 runtime error (I/O), 2 invalid config or flags,
// 3 a proposed-protocol solve hit the iteration limit.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dfrelay/experiment.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIterationLimit = 3;

void print_summary(const dfrelay::RunReport& rep) {
  const auto& c = rep.config;
  std::printf("K=%zu U=%zu N=%zu Ptot=%.2f dBW realizations=%zu seed=%llu\n", c.subcarriers,
              c.users, c.relays(), c.ptot_dbw, c.realizations,
              static_cast<unsigned long long>(c.seed));
  for (auto p : c.protocols) {
    const double w = rep.average_wsr(p);
    if (std::isnan(w))
      std::printf("  %-9s not applicable (high-power conditions not met)\n", dfrelay::to_string(p));
    else
      std::printf("  %-9s average WSR %.6f nats\n", dfrelay::to_string(p), w);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DF-relay OFDMA downlink resource allocation experiments"};
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> protocols;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool trace = false;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "experiment config (JSON)")->required();
  app.add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("-p,--protocols", protocols, "protocols to run: proposed reference highpower")
      ->delimiter(',');
  auto* seed_opt = app.add_option("-s,--seed", seed, "master seed (overrides seed)");
  app.add_option("-j,--jobs", jobs, "worker threads for Monte-Carlo runs")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
  app.add_flag("-v,--trace", trace, "record the dual iteration trace of the first realization");
  app.add_flag("-q,--quiet", quiet, "no summary on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  dfrelay::RunReport report;
  try {
    nlohmann::json j;
    {
      std::ifstream in(config_path);
      if (!in) throw dfrelay::ConfigError({"config: cannot open '" + config_path + "'"});
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw dfrelay::ConfigError({std::string("config: parse error: ") + e.what()});
      }
    }
    if (!protocols.empty()) j["protocols"] = protocols;
    if (*seed_opt) j["seed"] = seed;
    if (!out_dir.empty()) j["output_dir"] = out_dir;
    const auto config = dfrelay::parse_config(j);
    report = dfrelay::run_monte_carlo(config, jobs, trace);
  } catch (const dfrelay::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  try {
    const auto files = dfrelay::emit(report, report.config.output_dir);
    if (!quiet) {
      print_summary(report);
      for (const auto& f : files) std::printf("  wrote %s\n", f.string().c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  if (report.any_iteration_limit()) {
    std::cerr << "proposed solver hit the iteration limit on at least one realization\n";
    return kExitIterationLimit;
  }
  return 0;
}
