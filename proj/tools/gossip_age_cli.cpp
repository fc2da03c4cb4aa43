// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

// Command line front end: run sweeps, solve or simulate a single network,
// evaluate bound curves and print builder specs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gossip_age/bounds.hpp"
#include "gossip_age/errors.hpp"
#include "gossip_age/harness.hpp"
#include "gossip_age/network.hpp"
#include "gossip_age/shs_solver.hpp"
#include "gossip_age/simd/kernels.hpp"
#include "gossip_age/simulator.hpp"

namespace ga = gossip_age;

namespace {

ga::NetworkSpec read_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ga::Error(ga::ErrorCode::ConfigError, path + ": cannot open");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ga::Error(ga::ErrorCode::ConfigError, path + ": " + e.what());
  }
  return j.get<ga::NetworkSpec>();
}

struct BuildArgs {
  std::string builder = "toy_variant_13";
  int n = 4;
  double lambda_e = 1.0;
  double lambda = 1.0;
  double lambda_m = 1.0;
  bool full_mobility = true;
};

ga::NetworkSpec make_spec(const BuildArgs& a) {
  if (a.builder == "toy_variant_13") return ga::toy_variant_13(a.lambda_e, a.lambda, a.lambda_m);
  if (a.builder == "toy_variant_12") return ga::toy_variant_12(a.lambda_e, a.lambda, a.lambda_m);
  if (a.builder == "fully_connected") return ga::fully_connected(a.n, a.lambda_e, a.lambda, a.full_mobility, a.lambda_m);
  if (a.builder == "fc_plus_single") return ga::fc_plus_single(a.n, a.lambda_e, a.lambda);
  if (a.builder == "disconnected_pairs") return ga::disconnected_pairs(a.n, a.lambda_e, a.lambda, a.lambda_m);
  throw ga::Error(ga::ErrorCode::ConfigError, "unknown builder '" + a.builder + "'");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw ga::Error(ga::ErrorCode::ConfigError, path + ": cannot write");
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Version age of information in gossip networks with node mobility"};
  app.require_subcommand(1);
  std::string simd_isa;
  app.add_option("--simd", simd_isa, "Force a kernel variant (scalar, avx2, neon)");

  // run
  auto* run = app.add_subcommand("run", "Run a scenario sweep and write results.csv, manifest.json, plot.svg");
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool no_plot = false;
  auto* config_opt = run->add_option("--config", config_path, "ScenarioConfig JSON (or a manifest.json)");
  auto* preset_opt = run->add_option("--preset", preset_name, "Built-in scenario")
                         ->check(CLI::IsMember(ga::harness::preset_names()));
  config_opt->excludes(preset_opt);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Base seed for simulations");
  run->add_option("--workers", workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
  run->add_flag("--no-plot", no_plot, "Skip plot.svg");

  // build
  BuildArgs build_args;
  std::string build_out;
  auto* build = app.add_subcommand("build", "Print a builder network as JSON");
  const auto add_build_options = [&](CLI::App* cmd) {
    cmd->add_option("--builder", build_args.builder,
                    "toy_variant_13, toy_variant_12, fully_connected, fc_plus_single, disconnected_pairs");
    cmd->add_option("--n", build_args.n, "Number of positions");
    cmd->add_option("--lambda-e", build_args.lambda_e, "Source update rate");
    cmd->add_option("--lambda", build_args.lambda, "Total source delivery rate");
    cmd->add_option("--lambda-m", build_args.lambda_m, "Mobility rate");
    cmd->add_option("--full-mobility", build_args.full_mobility, "fully_connected: every pair swaps");
  };
  add_build_options(build);
  build->add_option("--out", build_out, "Output file (default stdout)");

  // solve
  std::string spec_path;
  std::string table_out;
  std::string ages_out;
  auto* solve = app.add_subcommand("solve", "Exact per-set ages of one network");
  add_build_options(solve);
  solve->add_option("--spec", spec_path, "NetworkSpec JSON instead of a builder");
  solve->add_option("--table", table_out, "Write set_bitmask,set_members,cardinality,v_S CSV");
  solve->add_option("--out", ages_out, "Position ages CSV (default stdout)");

  // simulate
  ga::SimConfig sim;
  std::string reps_out;
  std::string estimate_out;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of position ages");
  add_build_options(simulate);
  simulate->add_option("--spec", spec_path, "NetworkSpec JSON instead of a builder");
  simulate->add_option("--horizon", sim.horizon, "Time horizon per replication");
  simulate->add_option("--warmup", sim.warmup, "Discarded initial time");
  simulate->add_option("--replications", sim.replications, "Independent runs");
  simulate->add_option("--seed", sim.seed, "Base seed");
  simulate->add_option("--workers", sim.workers, "Replication threads");
  simulate->add_option("--replications-csv", reps_out, "Write replication,position,mean_age CSV");
  simulate->add_option("--out", estimate_out, "position,mean,stderr CSV (default stdout)");

  // bounds
  std::string kind_name = "fc_single_exact_recursion";
  std::vector<int> n_values{8, 16, 32, 64};
  std::string f_text = "n";
  double bound_lambda_e = 1.0;
  double bound_lambda = 1.0;
  std::string bound_out;
  auto* bounds = app.add_subcommand("bounds", "Evaluate a bound curve over n");
  bounds->add_option("--kind", kind_name,
                     "fc_single_exact_recursion, fc_single_log_closed_form, disconnected_recursion, "
                     "disconnected_sqrt_closed_form, disconnected_constant_regime");
  bounds->add_option("--n", n_values, "n values")->expected(1, -1);
  bounds->add_option("--f-of-n", f_text, "Mobility slowdown: n, sqrt(n), log(n) or a number");
  bounds->add_option("--lambda-e", bound_lambda_e, "Source update rate");
  bounds->add_option("--lambda", bound_lambda, "Total source delivery rate");
  bounds->add_option("--out", bound_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!simd_isa.empty()) {
      const ga::simd::Isa isa = simd_isa == "avx2"   ? ga::simd::Isa::Avx2
                                : simd_isa == "neon" ? ga::simd::Isa::Neon
                                                     : ga::simd::Isa::Scalar;
      if (!ga::simd::select(isa)) std::cerr << "warning: " << simd_isa << " unavailable, keeping default\n";
    }

    if (*run) {
      if (config_path.empty() && preset_name.empty()) {
        std::cerr << "error: run needs --config or --preset\n";
        return 1;
      }
      ga::harness::ScenarioConfig config;
      try {
        config = config_path.empty() ? ga::harness::preset(preset_name) : ga::harness::load_config(config_path);
      } catch (const ga::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
      }
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (seed) {
        if (!config.sim) config.sim = ga::harness::SimSettings{};
        config.sim->seed = *seed;
      }
      if (workers) config.workers = *workers;
      if (no_plot) config.plot = false;
      const ga::harness::SweepResult result = ga::harness::run(config);
      for (const std::string& e : result.errors) std::cerr << "engine error at " << e << '\n';
      std::cout << "wrote " << result.rows.size() << " rows to " << (config.output_dir / "results.csv").string()
                << '\n';
      return result.has_errors() ? 2 : 0;
    }

    if (*build) {
      std::ofstream file;
      nlohmann::json j = make_spec(build_args);
      open_out(build_out, file) << j.dump(2) << '\n';
      return 0;
    }

    const auto load = [&] { return ga::validate(spec_path.empty() ? make_spec(build_args) : read_spec(spec_path)); };

    if (*solve) {
      const ga::ValidatedNetwork net = load();
      const ga::AgeTable table = ga::solve_all(net);
      if (!table_out.empty()) {
        std::ofstream file;
        ga::write_age_table_csv(open_out(table_out, file), table);
      }
      std::ofstream file;
      ga::write_position_ages_csv(open_out(ages_out, file), table);
      return 0;
    }

    if (*simulate) {
      const ga::ValidatedNetwork net = load();
      const ga::SimEstimate est = ga::simulate(net, sim);
      if (!reps_out.empty()) {
        std::ofstream file;
        ga::write_replications_csv(open_out(reps_out, file), est);
      }
      std::ofstream file;
      ga::write_estimate_csv(open_out(estimate_out, file), est);
      return 0;
    }

    if (*bounds) {
      const ga::BoundCurve curve = ga::bound_curve(ga::bound_kind_from_string(kind_name), n_values, bound_lambda_e,
                                                   bound_lambda, ga::MobilityScale::parse(f_text));
      std::ofstream file;
      ga::write_bound_curve_csv(open_out(bound_out, file), curve);
      return 0;
    }
  } catch (const ga::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ga::ErrorCode::ConfigError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
