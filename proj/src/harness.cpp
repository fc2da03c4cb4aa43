// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "gossip_age/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "gossip_age/errors.hpp"
#include "gossip_age/shs_solver.hpp"
#include "numeric_format.hpp"

#ifndef GOSSIP_AGE_VERSION
#define GOSSIP_AGE_VERSION "0.0.0"
#endif

namespace gossip_age::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::ConfigError, path + ": " + message);
}

// Typed access to one JSON object with path-qualified errors. finish()
// rejects keys that were never read, so typos do not pass silently.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* get(std::string_view key) {
    used_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  const json& require(std::string_view key) {
    const json* v = get(key);
    if (!v) fail(at(key), "required field is missing");
    return *v;
  }

  double number(std::string_view key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(at(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(at(key), "must be finite");
    return d;
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      fail(at(key), "expected a nonnegative integer");
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(std::string_view key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(std::string_view key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<std::string> strings(std::string_view key) {
    std::vector<std::string> out;
    const json* v = get(key);
    if (!v) return out;
    if (!v->is_array()) fail(at(key), "expected an array of strings");
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) fail(at(key), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename E, std::size_t N>
E enum_from(std::string_view text, const std::array<E, N>& all, const std::string& path) {
  for (E e : all) {
    if (text == to_string(e)) return e;
  }
  std::string choices;
  for (E e : all) choices += (choices.empty() ? "" : ", ") + std::string(to_string(e));
  fail(path, "unknown value '" + std::string(text) + "' (expected one of " + choices + ")");
}

constexpr std::array kBuilders{Builder::Toy, Builder::FullyConnected, Builder::FcPlusSingle,
                               Builder::DisconnectedPairs};
constexpr std::array kEngines{Engine::Exact, Engine::Simulate, Engine::Bounds, Engine::NoMobilityReference};
constexpr std::array kSweeps{SweepParameter::LambdaM, SweepParameter::N};

std::string_view short_error(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return to_string(err->code());
  return "error";
}

}  // namespace

std::string_view to_string(Builder b) noexcept {
  switch (b) {
    case Builder::Toy: return "toy";
    case Builder::FullyConnected: return "fully_connected";
    case Builder::FcPlusSingle: return "fc_plus_single";
    case Builder::DisconnectedPairs: return "disconnected_pairs";
  }
  return "toy";
}

std::string_view to_string(Engine e) noexcept {
  switch (e) {
    case Engine::Exact: return "exact";
    case Engine::Simulate: return "simulate";
    case Engine::Bounds: return "bounds";
    case Engine::NoMobilityReference: return "no_mobility_reference";
  }
  return "exact";
}

std::string_view to_string(SweepParameter p) noexcept {
  return p == SweepParameter::LambdaM ? "lambda_m" : "n";
}

// ---------------------------------------------------------------------------
// Config parsing

ScenarioConfig parse_config(const json& root) {
  const json& j = (root.is_object() && root.contains("config") && !root.contains("scenario")) ? root["config"]
                                                                                              : root;
  ScenarioConfig c;
  Fields top(j, "");

  {
    Fields s(top.require("scenario"), "scenario");
    c.scenario.builder = enum_from(s.string("builder", ""), kBuilders, s.at("builder"));
    c.scenario.lambda_e = s.number("lambda_e", 1.0);
    c.scenario.lambda = s.number("lambda", 1.0);
    c.scenario.lambda_m = s.number("lambda_m", 0.0);
    c.scenario.n = static_cast<int>(s.integer("n", 0));
    c.scenario.full_mobility = s.boolean("full_mobility", true);
    if (const json* f = s.get("f_of_n")) {
      try {
        c.scenario.f_of_n = f->is_number() ? MobilityScale{MobilityScale::Kind::Constant, f->get<double>()}
                                           : MobilityScale::parse(f->get<std::string>());
      } catch (const std::exception&) {
        fail(s.at("f_of_n"), "expected n, sqrt(n), log(n) or a positive number");
      }
      if (c.scenario.f_of_n->kind == MobilityScale::Kind::Constant && !(c.scenario.f_of_n->constant > 0.0)) {
        fail(s.at("f_of_n"), "must be positive");
      }
    }
    const std::vector<std::string> variants = s.strings("variants");
    if (!variants.empty()) {
      c.scenario.variants.clear();
      for (std::size_t i = 0; i < variants.size(); ++i) {
        try {
          c.scenario.variants.push_back(toy_variant_from_string(variants[i]));
        } catch (const Error&) {
          fail(s.at("variants") + "[" + std::to_string(i) + "]",
               "unknown toy variant '" + variants[i] + "' (expected none, exchange_13, exchange_12)");
        }
      }
    }
    s.finish();
    if (!(c.scenario.lambda_e > 0.0)) fail("scenario.lambda_e", "must be positive");
    if (!(c.scenario.lambda > 0.0)) fail("scenario.lambda", "must be positive");
    if (c.scenario.lambda_m < 0.0) fail("scenario.lambda_m", "must be >= 0");
  }

  {
    const std::vector<std::string> engines = top.strings("engines");
    if (engines.empty()) fail("engines", "at least one engine is required");
    for (std::size_t i = 0; i < engines.size(); ++i) {
      const Engine e = enum_from(engines[i], kEngines, "engines[" + std::to_string(i) + "]");
      if (std::find(c.engines.begin(), c.engines.end(), e) != c.engines.end()) {
        fail("engines[" + std::to_string(i) + "]", "duplicate engine");
      }
      c.engines.push_back(e);
    }
  }

  {
    Fields s(top.require("sweep"), "sweep");
    c.sweep_parameter = enum_from(s.string("parameter", ""), kSweeps, s.at("parameter"));
    const json& values = s.require("values");
    if (!values.is_array() || values.empty()) fail("sweep.values", "expected a nonempty array");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string at = "sweep.values[" + std::to_string(i) + "]";
      if (!values[i].is_number()) fail(at, "expected a number");
      const double v = values[i].get<double>();
      if (!(v > 0.0) || !std::isfinite(v)) fail(at, "sweep values must be positive");
      if (c.sweep_parameter == SweepParameter::N && (v != std::floor(v) || v < 2 || v > 1e6)) {
        fail(at, "n must be an integer in [2, 1e6]");
      }
      c.sweep_values.push_back(v);
    }
    s.finish();
  }

  if (const json* sim = top.get("sim")) {
    Fields s(*sim, "sim");
    SimSettings st;
    st.horizon = s.number("horizon", st.horizon);
    st.warmup = s.number("warmup", st.horizon / 10);
    st.replications = static_cast<int>(s.integer("replications", st.replications));
    st.seed = s.unsigned_integer("seed", st.seed);
    st.workers = static_cast<int>(s.integer("workers", st.workers));
    st.max_n = static_cast<int>(s.integer("max_n", st.max_n));
    s.finish();
    if (!(st.horizon > 0.0)) fail("sim.horizon", "must be positive");
    if (!(st.warmup >= 0.0) || !(st.warmup < st.horizon)) fail("sim.warmup", "must be in [0, horizon)");
    if (st.replications < 2) fail("sim.replications", "need at least 2 for a standard error");
    if (st.workers < 1) fail("sim.workers", "must be >= 1");
    if (st.max_n < 1) fail("sim.max_n", "must be >= 1");
    c.sim = st;
  }

  c.output_dir = top.string("output_dir", "out");
  c.plot = top.boolean("plot", true);
  c.workers = static_cast<int>(top.integer("workers", 1));
  if (c.workers < 1) fail("workers", "must be >= 1");
  c.plot_engines = top.strings("plot_engines");
  c.plot_targets = top.strings("plot_targets");
  const std::string x_scale = top.string("x_scale", "log");
  if (x_scale != "log" && x_scale != "linear") fail("x_scale", "expected log or linear");
  c.log_x = x_scale == "log";
  top.finish();

  // Cross-field checks.
  const bool has_sim = std::find(c.engines.begin(), c.engines.end(), Engine::Simulate) != c.engines.end();
  if (has_sim && !c.sim) fail("sim", "the simulate engine requires a sim block");
  const Builder b = c.scenario.builder;
  if (b == Builder::Toy && c.sweep_parameter == SweepParameter::N) {
    fail("sweep.parameter", "the toy network has fixed n = 3");
  }
  if (b != Builder::Toy && c.sweep_parameter == SweepParameter::LambdaM) {
    const int n = c.scenario.n;
    if (n < 2) fail("scenario.n", "required (>= 2) when sweeping lambda_m");
    if (b == Builder::DisconnectedPairs && n % 2 != 0) fail("scenario.n", "must be even for disconnected_pairs");
    if (b == Builder::FcPlusSingle) fail("sweep.parameter", "fc_plus_single fixes lambda_m = lambda; sweep n");
  }
  if (b == Builder::DisconnectedPairs && c.sweep_parameter == SweepParameter::N) {
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
      if (static_cast<std::int64_t>(c.sweep_values[i]) % 2 != 0) {
        fail("sweep.values[" + std::to_string(i) + "]", "disconnected_pairs needs even n");
      }
    }
  }
  if (b == Builder::FcPlusSingle && c.scenario.lambda_m != 0.0 && c.scenario.lambda_m != c.scenario.lambda) {
    fail("scenario.lambda_m", "fc_plus_single uses lambda_m = lambda");
  }
  if (b == Builder::FullyConnected &&
      std::find(c.engines.begin(), c.engines.end(), Engine::Bounds) != c.engines.end()) {
    fail("engines", "no bounds exist for fully_connected");
  }
  if (c.scenario.f_of_n && b != Builder::DisconnectedPairs) {
    fail("scenario.f_of_n", "only disconnected_pairs uses f_of_n");
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(line) + ":" +
                                            std::to_string(column) + ": JSON syntax error");
  }
  try {
    return parse_config(j);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

json to_json(const ScenarioConfig& c) {
  json scenario = {{"builder", to_string(c.scenario.builder)},
                   {"lambda_e", c.scenario.lambda_e},
                   {"lambda", c.scenario.lambda},
                   {"lambda_m", c.scenario.lambda_m}};
  if (c.scenario.builder != Builder::Toy) scenario["n"] = c.scenario.n;
  if (c.scenario.builder == Builder::FullyConnected) scenario["full_mobility"] = c.scenario.full_mobility;
  if (c.scenario.f_of_n) {
    if (c.scenario.f_of_n->kind == MobilityScale::Kind::Constant) {
      scenario["f_of_n"] = c.scenario.f_of_n->constant;
    } else {
      scenario["f_of_n"] = c.scenario.f_of_n->to_string();
    }
  }
  if (c.scenario.builder == Builder::Toy) {
    json variants = json::array();
    for (ToyVariant v : c.scenario.variants) variants.push_back(to_string(v));
    scenario["variants"] = variants;
  }
  json engines = json::array();
  for (Engine e : c.engines) engines.push_back(to_string(e));
  json out = {{"scenario", scenario},
              {"engines", engines},
              {"sweep", {{"parameter", to_string(c.sweep_parameter)}, {"values", c.sweep_values}}},
              {"output_dir", c.output_dir.generic_string()},
              {"plot", c.plot},
              {"workers", c.workers},
              {"x_scale", c.log_x ? "log" : "linear"}};
  if (c.sim) {
    out["sim"] = {{"horizon", c.sim->horizon},       {"warmup", c.sim->warmup},
                  {"replications", c.sim->replications}, {"seed", c.sim->seed},
                  {"workers", c.sim->workers},       {"max_n", c.sim->max_n}};
  }
  if (!c.plot_engines.empty()) out["plot_engines"] = c.plot_engines;
  if (!c.plot_targets.empty()) out["plot_targets"] = c.plot_targets;
  return out;
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::string> preset_names() { return {"fig6", "fig7", "fig8", "fig9"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  c.scenario.lambda_e = 1.0;
  c.scenario.lambda = 1.0;
  c.output_dir = std::filesystem::path("out") / std::string(name);
  if (name == "fig6" || name == "fig7") {
    c.scenario.builder = Builder::Toy;
    c.engines = {Engine::Exact, Engine::Bounds};
    c.sweep_parameter = SweepParameter::LambdaM;
    c.sweep_values = {0.001, 0.01, 0.1, 1, 10, 100, 1000};
    c.plot_engines = {"bounds"};
    c.plot_targets = name == "fig6" ? std::vector<std::string>{"mean"}
                                    : std::vector<std::string>{"v_1", "v_2", "v_3"};
    return c;
  }
  if (name == "fig8") {
    c.scenario.builder = Builder::FcPlusSingle;
    c.scenario.lambda_m = 1.0;
    c.engines = {Engine::Simulate, Engine::Bounds, Engine::NoMobilityReference};
    c.sweep_parameter = SweepParameter::N;
    c.sweep_values = {8, 16, 32, 64, 128};
    c.sim = SimSettings{};
    c.plot_targets = {"fc_position"};
    return c;
  }
  if (name == "fig9") {
    c.scenario.builder = Builder::DisconnectedPairs;
    c.scenario.f_of_n = MobilityScale{MobilityScale::Kind::Linear, 1.0};
    c.engines = {Engine::Simulate, Engine::Bounds, Engine::NoMobilityReference};
    c.sweep_parameter = SweepParameter::N;
    c.sweep_values = {8, 16, 32, 64, 128, 256};
    c.sim = SimSettings{};
    c.plot_targets = {"single_node"};
    return c;
  }
  throw Error(ErrorCode::UnknownPreset, "'" + std::string(name) + "' (expected fig6, fig7, fig8 or fig9)");
}

// ---------------------------------------------------------------------------
// Engines

namespace {

struct Point {
  int n = 0;
  double lambda_m = 0.0;
  std::optional<double> f;  // disconnected_pairs slowdown at this point
};

Point resolve_point(const ScenarioConfig& c, double x) {
  Point p;
  if (c.sweep_parameter == SweepParameter::LambdaM) {
    p.n = c.scenario.builder == Builder::Toy ? 3 : c.scenario.n;
    p.lambda_m = x;
  } else {
    p.n = static_cast<int>(std::llround(x));
    p.lambda_m = c.scenario.lambda_m;
    if (c.scenario.f_of_n) p.lambda_m = c.scenario.lambda / (*c.scenario.f_of_n)(p.n);
  }
  if (c.scenario.builder == Builder::FcPlusSingle) p.lambda_m = c.scenario.lambda;
  if (c.scenario.builder == Builder::DisconnectedPairs && p.lambda_m > 0.0) {
    p.f = c.scenario.f_of_n && c.sweep_parameter == SweepParameter::N ? (*c.scenario.f_of_n)(p.n)
                                                                     : c.scenario.lambda / p.lambda_m;
  }
  return p;
}

NetworkSpec build(const ScenarioConfig& c, const Point& p) {
  const ScenarioParams& s = c.scenario;
  switch (s.builder) {
    case Builder::FullyConnected: return fully_connected(p.n, s.lambda_e, s.lambda, s.full_mobility, p.lambda_m);
    case Builder::FcPlusSingle: return fc_plus_single(p.n, s.lambda_e, s.lambda);
    case Builder::DisconnectedPairs: return disconnected_pairs(p.n, s.lambda_e, s.lambda, p.lambda_m);
    case Builder::Toy: break;
  }
  throw Error(ErrorCode::ConfigError, "toy networks are built per variant");
}

// A quantity reported per engine, computed from per-position ages.
struct Target {
  std::string name;
  std::function<double(const std::vector<double>&)> reduce;
};

double average(const std::vector<double>& v, std::size_t first, std::size_t last) {
  double total = 0.0;
  for (std::size_t i = first; i < last; ++i) total += v[i];
  return total / static_cast<double>(last - first);
}

std::vector<Target> targets_for(Builder b, int n) {
  std::vector<Target> out;
  const auto mean = [](const std::vector<double>& v) { return average(v, 0, v.size()); };
  switch (b) {
    case Builder::Toy:
    case Builder::FullyConnected:
      for (int i = 0; i < n; ++i) {
        out.push_back({"v_" + std::to_string(i + 1), [i](const std::vector<double>& v) { return v[i]; }});
      }
      out.push_back({"mean", mean});
      break;
    case Builder::FcPlusSingle:
      // The single position is the last one; the block positions are symmetric.
      out.push_back({"fc_position", [](const std::vector<double>& v) { return average(v, 0, v.size() - 1); }});
      out.push_back({"single_node", [](const std::vector<double>& v) { return v.back(); }});
      out.push_back({"mean", mean});
      break;
    case Builder::DisconnectedPairs:
      out.push_back({"single_node", mean});
      break;
  }
  return out;
}

void emit_exact(std::vector<ResultRow>& rows, double x, const std::string& engine, Builder b, int n,
                const std::vector<double>& ages) {
  for (const Target& t : targets_for(b, n)) rows.push_back({x, engine, t.name, t.reduce(ages), std::nullopt, {}});
}

void emit_simulated(std::vector<ResultRow>& rows, double x, const std::string& engine, Builder b, int n,
                    const SimEstimate& est) {
  for (const Target& t : targets_for(b, n)) {
    std::vector<double> per_rep;
    for (const ReplicationResult& r : est.replications) per_rep.push_back(t.reduce(r.position_means));
    const double m = average(per_rep, 0, per_rep.size());
    double ss = 0.0;
    for (double v : per_rep) ss += (v - m) * (v - m);
    const double k = static_cast<double>(per_rep.size());
    rows.push_back({x, engine, t.name, m, std::sqrt(ss / (k - 1) / k), {}});
  }
}

SimConfig sim_config(const SimSettings& s, std::uint64_t seed) {
  SimConfig sc;
  sc.horizon = s.horizon;
  sc.warmup = s.warmup;
  sc.replications = s.replications;
  sc.seed = seed;
  sc.workers = s.workers;
  return sc;
}

void run_engine(const ScenarioConfig& c, Engine engine, double x, std::uint64_t seed, std::vector<ResultRow>& rows,
                std::vector<std::string>* skipped) {
  const ScenarioParams& s = c.scenario;
  const Point p = resolve_point(c, x);
  const std::string label(to_string(engine));
  const auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    const std::size_t mark = rows.size();
    try {
      body();
    } catch (const std::exception& e) {
      rows.resize(mark);
      ResultRow row{x, name, "error", std::nan(""), std::nullopt, std::string(short_error(e)) + ": " + e.what()};
      rows.push_back(std::move(row));
    }
  };

  if (s.builder == Builder::Toy) {
    std::uint64_t run = 0;
    for (ToyVariant v : s.variants) {
      const std::string name = label + ":" + std::string(to_string(v));
      const std::uint64_t run_seed = replication_seed(seed, run++);
      if (engine == Engine::NoMobilityReference && v != s.variants.front()) break;
      guarded(engine == Engine::NoMobilityReference ? label : name, [&] {
        const double lm = v == ToyVariant::None ? 0.0 : p.lambda_m;
        switch (engine) {
          case Engine::Exact: {
            const AgeTable t = solve_all(validate(toy_network(v, s.lambda_e, s.lambda, lm)));
            emit_exact(rows, x, name, s.builder, 3, t.position_ages());
            break;
          }
          case Engine::Simulate: {
            const SimEstimate est =
                simulate(validate(toy_network(v, s.lambda_e, s.lambda, lm)), sim_config(*c.sim, run_seed));
            emit_simulated(rows, x, name, s.builder, 3, est);
            break;
          }
          case Engine::Bounds: {
            const ToyAges a = toy_ages(v, s.lambda_e, s.lambda, lm);
            emit_exact(rows, x, name, s.builder, 3, {a.v1, a.v2, a.v3});
            break;
          }
          case Engine::NoMobilityReference: {
            const AgeTable t =
                no_mobility_reference(validate(toy_network(ToyVariant::None, s.lambda_e, s.lambda, 0.0)));
            emit_exact(rows, x, label, s.builder, 3, t.position_ages());
            break;
          }
        }
      });
    }
    return;
  }

  switch (engine) {
    case Engine::Exact:
      guarded(label, [&] {
        const AgeTable t = solve_all(validate(build(c, p)));
        emit_exact(rows, x, label, s.builder, p.n, t.position_ages());
      });
      break;
    case Engine::Simulate:
      if (p.n > c.sim->max_n) {
        if (skipped) skipped->push_back(format_double(x) + " simulate: n above sim.max_n");
        break;
      }
      guarded(label, [&] {
        const SimEstimate est = simulate(validate(build(c, p)), sim_config(*c.sim, seed));
        emit_simulated(rows, x, label, s.builder, p.n, est);
      });
      break;
    case Engine::Bounds:
      if (s.builder == Builder::FcPlusSingle) {
        guarded(label + ":recursion", [&] {
          rows.push_back({x, label + ":recursion", "fc_position",
                          fc_single_bound_recursion(p.n, s.lambda_e, s.lambda), std::nullopt, {}});
        });
        guarded(label + ":log", [&] {
          rows.push_back(
              {x, label + ":log", "fc_position", fc_single_log_bound(p.n, s.lambda_e, s.lambda), std::nullopt, {}});
        });
      } else {
        const auto need_f = [&] {
          if (!p.f) throw Error(ErrorCode::BadScale, "bounds need lambda_m > 0");
          return *p.f;
        };
        guarded(label + ":recursion", [&] {
          rows.push_back({x, label + ":recursion", "single_node",
                          disconnected_bound_recursion(p.n, s.lambda_e, s.lambda, need_f()), std::nullopt, {}});
        });
        guarded(label + ":scaling", [&] {
          rows.push_back({x, label + ":scaling", "single_node",
                          disconnected_scaling_bound(p.n, s.lambda_e, s.lambda, need_f()), std::nullopt, {}});
        });
        if (s.f_of_n && s.f_of_n->kind == MobilityScale::Kind::Constant) {
          guarded(label + ":constant", [&] {
            rows.push_back({x, label + ":constant", "single_node",
                            disconnected_constant_bound(p.n, s.lambda_e, s.lambda, need_f()), std::nullopt, {}});
          });
        }
      }
      break;
    case Engine::NoMobilityReference:
      guarded(label, [&] {
        if (s.builder == Builder::FcPlusSingle) {
          const auto [block, single] = fc_single_no_mobility_ages(p.n, s.lambda_e, s.lambda);
          std::vector<double> ages(static_cast<std::size_t>(p.n), block);
          ages.back() = single;
          emit_exact(rows, x, label, s.builder, p.n, ages);
        } else if (s.builder == Builder::DisconnectedPairs) {
          rows.push_back({x, label, "single_node", disconnected_no_mobility_age(p.n, s.lambda_e, s.lambda),
                          std::nullopt, {}});
        } else {
          const AgeTable t = no_mobility_reference(validate(build(c, p)));
          emit_exact(rows, x, label, s.builder, p.n, t.position_ages());
        }
      });
      break;
  }
}

}  // namespace

std::vector<ResultRow> evaluate_point(const ScenarioConfig& config, double sweep_value, std::uint64_t seed,
                                      std::vector<std::string>* skipped) {
  std::vector<ResultRow> rows;
  for (std::size_t e = 0; e < config.engines.size(); ++e) {
    run_engine(config, config.engines[e], sweep_value, replication_seed(seed, e), rows, skipped);
  }
  return rows;
}

SweepResult run_sweep(const ScenarioConfig& config) {
  const std::size_t points = config.sweep_values.size();
  const std::uint64_t base = config.sim ? config.sim->seed : 1;
  SweepResult result;
  for (std::size_t i = 0; i < points; ++i) result.point_seeds.push_back(replication_seed(base, i));

  std::vector<std::vector<ResultRow>> per_point(points);
  std::vector<std::vector<std::string>> per_skip(points);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < points; i = next++) {
      per_point[i] = evaluate_point(config, config.sweep_values[i], result.point_seeds[i], &per_skip[i]);
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(config.workers), points);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < points; ++i) {
    for (ResultRow& row : per_point[i]) {
      if (row.error) result.errors.push_back(format_double(row.sweep_value) + " " + row.engine + ": " + *row.error);
      result.rows.push_back(std::move(row));
    }
    for (std::string& s : per_skip[i]) result.skipped.push_back(std::move(s));
  }
  return result;
}

void write_results_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : result.rows) {
    out << format_double(r.sweep_value) << ',' << r.engine << ',' << r.target << ',';
    out << (r.error ? std::string("nan") : format_double(r.value)) << ',';
    if (r.stderr_value) out << format_double(*r.stderr_value);
    out << '\n';
  }
}

json make_manifest(const ScenarioConfig& config, const SweepResult& result) {
  json points = json::array();
  for (std::size_t i = 0; i < config.sweep_values.size(); ++i) {
    points.push_back({{"sweep_value", config.sweep_values[i]}, {"seed", result.point_seeds[i]}});
  }
  json outputs = {"results.csv", "manifest.json"};
  if (config.plot) outputs.push_back("plot.svg");
  return {{"tool", "gossip_age"},       {"version", GOSSIP_AGE_VERSION}, {"config", to_json(config)},
          {"points", points},           {"errors", result.errors},       {"skipped", result.skipped},
          {"outputs", outputs}};
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

bool selected(const std::vector<std::string>& filter, const std::string& value, bool prefix_match) {
  if (filter.empty()) return true;
  for (const std::string& f : filter) {
    if (value == f) return true;
    if (prefix_match && value.size() > f.size() && value.compare(0, f.size(), f) == 0 && value[f.size()] == ':') {
      return true;
    }
  }
  return false;
}

// Round step for about `count` intervals over `span`.
double nice_step(double span, int count) {
  const double raw = span / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

}  // namespace

void emit_plot(std::ostream& out, const SweepResult& result, const ScenarioConfig& config) {
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  for (const ResultRow& r : result.rows) {
    if (r.error || !std::isfinite(r.value)) continue;
    if (!selected(config.plot_engines, r.engine, true) || !selected(config.plot_targets, r.target, false)) continue;
    const std::string label = r.engine + " " + r.target;
    auto [it, inserted] = index.emplace(label, series.size());
    if (inserted) series.push_back({label, {}});
    series[it->second].points.emplace_back(r.sweep_value, r.value);
  }
  if (series.empty()) throw Error(ErrorCode::EmptyResult, "no plottable rows");

  const bool log_x = config.log_x;
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const Series& s : series) {
    for (auto [x, y] : s.points) {
      const double tx = log_x ? std::log10(x) : x;
      x_lo = std::min(x_lo, tx);
      x_hi = std::max(x_hi, tx);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi == y_lo) {
    const double pad = std::max(0.5, std::abs(y_lo) * 0.1);
    y_lo -= pad;
    y_hi += pad;
  }
  const double y_step = nice_step(y_hi - y_lo, 5);
  y_lo = std::floor(y_lo / y_step) * y_step;
  y_hi = std::ceil(y_hi / y_step) * y_step;

  constexpr double kWidth = 900, kHeight = 520, kLeft = 80, kRight = 280, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + ((log_x ? std::log10(x) : x) - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };
  static constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"DejaVu Sans, Arial, sans-serif\""
      << " font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(std::string(to_string(config.scenario.builder))) << ": average version age vs "
      << to_string(config.sweep_parameter) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double y = y_lo; y <= y_hi + y_step * 1e-9; y += y_step) {
    const std::string yy = fmt("%.2f", py(y));
    out << "<line x1=\"" << kLeft << "\" y1=\"" << yy << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << yy
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << yy << "\" text-anchor=\"end\" dominant-baseline=\"middle\">"
        << fmt("%g", std::abs(y) < y_step * 1e-9 ? 0.0 : y) << "</text>\n";
  }
  std::set<double> xs(config.sweep_values.begin(), config.sweep_values.end());
  for (double x : xs) {
    const std::string xx = fmt("%.2f", px(x));
    out << "<line x1=\"" << xx << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << xx << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << xx << "\" y=\"" << kTop + plot_h + 20 << "\" text-anchor=\"middle\">" << fmt("%g", x)
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << to_string(config.sweep_parameter) << (log_x ? " (log scale)" : "") << "</text>\n";
  out << "<text x=\"20\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << kTop + plot_h / 2 << ")\">version age</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < series[i].points.size(); ++k) {
      const auto [x, y] = series[i].points[k];
      out << (k ? " " : "") << fmt("%.2f", px(x)) << ',' << fmt("%.2f", py(y));
    }
    out << "\"/>\n";
    for (const auto& [x, y] : series[i].points) {
      out << "<circle cx=\"" << fmt("%.2f", px(x)) << "\" cy=\"" << fmt("%.2f", py(y)) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + plot_w + 20;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly << "\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << lx + 30 << "\" y=\"" << ly << "\" dominant-baseline=\"middle\">"
        << xml_escape(series[i].label) << "</text>\n";
  }
  out << "</svg>\n";
}

SweepResult run(const ScenarioConfig& config) {
  SweepResult result = run_sweep(config);
  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream csv(config.output_dir / "results.csv", std::ios::binary);
    write_results_csv(csv, result);
  }
  if (config.plot) {
    try {
      std::ostringstream svg;
      emit_plot(svg, result, config);
      std::ofstream(config.output_dir / "plot.svg", std::ios::binary) << svg.str();
    } catch (const Error& e) {
      result.errors.push_back(std::string("plot: ") + e.what());
    }
  }
  std::ofstream(config.output_dir / "manifest.json", std::ios::binary) << make_manifest(config, result).dump(2)
                                                                       << '\n';
  return result;
}

}  // namespace gossip_age::harness
