// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gossip_age/bounds.hpp"
#include "gossip_age/simulator.hpp"

namespace gossip_age::harness {

inline constexpr std::string_view kCsvHeader = "sweep_value,engine,target,value,stderr";

enum class Builder { Toy, FullyConnected, FcPlusSingle, DisconnectedPairs };
enum class Engine { Exact, Simulate, Bounds, NoMobilityReference };
enum class SweepParameter { LambdaM, N };

std::string_view to_string(Builder b) noexcept;
std::string_view to_string(Engine e) noexcept;
std::string_view to_string(SweepParameter p) noexcept;

struct ScenarioParams {
  Builder builder = Builder::Toy;
  double lambda_e = 1.0;
  double lambda = 1.0;
  double lambda_m = 0.0;  // used when the sweep is over n and f_of_n is unset
  int n = 0;              // used when the sweep is over lambda_m
  bool full_mobility = true;
  std::optional<MobilityScale> f_of_n;  // disconnected_pairs: lambda_m = lambda / f(n)
  std::vector<ToyVariant> variants{ToyVariant::None, ToyVariant::Exchange13, ToyVariant::Exchange12};
};

struct SimSettings {
  double horizon = 2e5;
  double warmup = 2e4;
  int replications = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  int max_n = 256;  // simulate is skipped above this n
};

struct ScenarioConfig {
  ScenarioParams scenario;
  std::vector<Engine> engines;
  SweepParameter sweep_parameter = SweepParameter::LambdaM;
  std::vector<double> sweep_values;
  std::optional<SimSettings> sim;
  std::filesystem::path output_dir = "out";
  bool plot = true;
  int workers = 1;  // concurrent sweep points
  /// Optional series filters for plot.svg; empty keeps everything.
  std::vector<std::string> plot_engines;
  std::vector<std::string> plot_targets;
  bool log_x = true;
};

/// Parses and validates a ScenarioConfig. Accepts a manifest.json too (its
/// "config" member). Throws Error(ConfigError) naming the offending field.
ScenarioConfig parse_config(const nlohmann::json& j);
/// Reads a file; JSON syntax errors report line and column.
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);

/// fig6, fig7, fig8, fig9. Throws Error(UnknownPreset).
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct ResultRow {
  double sweep_value = 0.0;
  std::string engine;
  std::string target;
  double value = 0.0;
  std::optional<double> stderr_value;
  std::optional<std::string> error;  // set on failed engine evaluations

  bool operator==(const ResultRow&) const = default;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> errors;   // "sweep_value engine: message"
  std::vector<std::string> skipped;  // simulate points over sim.max_n
  std::vector<std::uint64_t> point_seeds;

  bool has_errors() const { return !errors.empty(); }
};

/// Evaluates every engine at one sweep point. Never throws for engine
/// failures; they become error rows.
std::vector<ResultRow> evaluate_point(const ScenarioConfig& config, double sweep_value,
                                      std::uint64_t seed, std::vector<std::string>* skipped = nullptr);

/// Runs the sweep (points concurrently up to config.workers) in memory.
SweepResult run_sweep(const ScenarioConfig& config);

void write_results_csv(std::ostream& out, const SweepResult& result);
nlohmann::json make_manifest(const ScenarioConfig& config, const SweepResult& result);

/// Deterministic SVG line plot. Throws Error(EmptyResult).
void emit_plot(std::ostream& out, const SweepResult& result, const ScenarioConfig& config);

/// run_sweep plus results.csv, manifest.json and (if enabled) plot.svg in
/// config.output_dir.
SweepResult run(const ScenarioConfig& config);

}  // namespace gossip_age::harness
