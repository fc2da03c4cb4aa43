// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gossip_age/errors.hpp"
#include "gossip_age/harness.hpp"

using namespace gossip_age;
using namespace gossip_age::harness;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

json minimal() {
  return json::parse(R"({
    "scenario": {"builder": "toy"},
    "engines": ["exact"],
    "sweep": {"parameter": "lambda_m", "values": [0.1, 1]}
  })");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string csv(const SweepResult& r) {
  std::ostringstream out;
  write_results_csv(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("config diagnostics name the field") {
  CHECK_NOTHROW(parse_config(minimal()));

  json j = minimal();
  j["sweep"]["values"][1] = -1;
  CHECK(config_error(j).find("sweep.values[1]") != std::string::npos);

  j = minimal();
  j["engines"] = json::array();
  CHECK(config_error(j).find("engines") != std::string::npos);

  j = minimal();
  j["engines"] = {"simulate"};
  CHECK(config_error(j).find("sim") != std::string::npos);

  j = minimal();
  j["scenario"]["buildr"] = "toy";
  CHECK(config_error(j).find("scenario.buildr") != std::string::npos);

  j = minimal();
  j["scenario"]["builder"] = "ring";
  CHECK(config_error(j).find("scenario.builder") != std::string::npos);

  j = minimal();
  j["sweep"]["parameter"] = "n";
  j["sweep"]["values"] = {4, 8};
  CHECK(config_error(j).find("sweep.parameter") != std::string::npos);

  j = minimal();
  j["scenario"]["variants"] = {"exchange_14"};
  CHECK(config_error(j).find("scenario.variants[0]") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
  const std::filesystem::path p = "broken_config.json";
  std::ofstream(p) << "{\n  \"scenario\": {\"builder\": \"toy\"},\n  \"engines\": [\"exact\" \"bounds\"]\n}\n";
  try {
    load_config(p);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("broken_config.json:3:") != std::string::npos);
  }
}

TEST_CASE("presets") {
  for (const std::string& name : preset_names()) {
    const ScenarioConfig c = preset(name);
    // every preset survives a JSON round trip unchanged
    CHECK(to_json(parse_config(to_json(c))) == to_json(c));
  }
  CHECK(preset("fig8").scenario.lambda_m == 1.0);
  CHECK(to_json(preset("fig8"))["scenario"]["lambda_m"] == 1.0);
  try {
    preset("fig10");
    FAIL("expected UnknownPreset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownPreset);
  }
}

TEST_CASE("fig6: closed forms, ordering and three polylines") {
  const ScenarioConfig c = preset("fig6");
  const SweepResult r = run_sweep(c);
  CHECK_FALSE(r.has_errors());
  CHECK(csv(r).rfind(std::string(kCsvHeader) + "\n", 0) == 0);

  double none = 0, e13 = 0, e12 = 0;
  for (const ResultRow& row : r.rows) {
    if (row.sweep_value == 1000 && row.target == "mean" && row.engine.rfind("bounds:", 0) == 0) {
      (row.engine == "bounds:none" ? none : row.engine == "bounds:exchange_13" ? e13 : e12) = row.value;
    }
  }
  CHECK(e13 < e12);
  CHECK(e12 < none);

  std::ostringstream a, b;
  emit_plot(a, r, c);
  emit_plot(b, run_sweep(c), c);
  CHECK(a.str() == b.str());
  std::size_t polylines = 0;
  for (std::size_t pos = 0; (pos = a.str().find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
  CHECK(polylines == 3);
}

TEST_CASE("fig7 at lambda_m = 1000") {
  const SweepResult r = run_sweep(preset("fig7"));
  for (const ResultRow& row : r.rows) {
    if (row.sweep_value != 1000 || row.engine != "exact:exchange_13") continue;
    if (row.target == "v_1" || row.target == "v_3") CHECK(row.value == doctest::Approx(5.0 / 3).epsilon(1e-3));
    if (row.target == "v_2") CHECK(row.value == doctest::Approx(2.0));
  }
}

TEST_CASE("single engine single target gives one polyline") {
  json j = minimal();
  j["scenario"]["variants"] = {"exchange_13"};
  j["plot_targets"] = {"v_1"};
  const ScenarioConfig c = parse_config(j);
  std::ostringstream out;
  emit_plot(out, run_sweep(c), c);
  CHECK(out.str().find("<polyline") == out.str().rfind("<polyline"));

  SweepResult empty;
  CHECK_THROWS_AS(emit_plot(out, empty, c), Error);
}

TEST_CASE("engine failures stay local to their sweep point") {
  json j = json::parse(R"({
    "scenario": {"builder": "fully_connected", "lambda_m": 0.5},
    "engines": ["exact"],
    "sweep": {"parameter": "n", "values": [4, 26, 5]}
  })");
  const ScenarioConfig c = parse_config(j);
  const SweepResult r = run_sweep(c);
  CHECK(r.has_errors());
  bool marker = false;
  for (const ResultRow& row : r.rows) marker = marker || (row.sweep_value == 26 && row.target == "error");
  CHECK(marker);

  json alone = j;
  alone["sweep"]["values"] = {4, 5};
  const SweepResult ok = run_sweep(parse_config(alone));
  std::vector<ResultRow> kept;
  for (const ResultRow& row : r.rows) {
    if (row.sweep_value != 26) kept.push_back(row);
  }
  CHECK(kept == ok.rows);
}

TEST_CASE("run writes files and reruns from its manifest byte for byte") {
  json j = json::parse(R"({
    "scenario": {"builder": "disconnected_pairs", "f_of_n": "n"},
    "engines": ["simulate", "bounds", "no_mobility_reference", "exact"],
    "sweep": {"parameter": "n", "values": [6, 8]},
    "sim": {"horizon": 300, "warmup": 30, "replications": 3, "seed": 5},
    "workers": 2,
    "output_dir": "harness_run_a"
  })");
  const ScenarioConfig c = parse_config(j);
  const SweepResult r = run(c);
  CHECK_FALSE(r.has_errors());
  const std::string first = slurp("harness_run_a/results.csv");
  CHECK(first.rfind("sweep_value,engine,target,value,stderr\n", 0) == 0);
  CHECK(std::filesystem::exists("harness_run_a/plot.svg"));

  ScenarioConfig again = load_config("harness_run_a/manifest.json");
  again.output_dir = "harness_run_b";
  again.workers = 1;
  run(again);
  CHECK(slurp("harness_run_b/results.csv") == first);
  const json manifest = json::parse(slurp("harness_run_a/manifest.json"));
  CHECK(manifest["points"].size() == 2);
  CHECK(manifest.contains("version"));
}
