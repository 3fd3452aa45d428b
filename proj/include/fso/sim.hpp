#pragma once

#include <string>
#include <vector>

#include "fso/json_io.hpp"
#include "fso/runtime.hpp"

namespace fso {

enum class ScenarioKind { fire, healthcare, falls };
const char* to_string(ScenarioKind k);
ScenarioKind scenario_kind_from(const std::string& name);

/// {scenario, fso, horizon, seed, cooperation, params{...}}. `fso` may be an
/// inline hierarchy object or a path relative to the config file.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::fire;
  Json fso_spec;
  Tick horizon = 0;
  std::uint64_t seed = 0;
  bool cooperation = true;
  Json params;
};

ScenarioConfig scenario_from_json(const Json& j, const std::string& base_dir = ".");

struct Metrics {
  std::string scenario;
  std::uint64_t seed = 0;
  bool cooperation = true;
  Tick horizon = 0;

  std::uint64_t requests = 0;
  std::uint64_t local_enrollments = 0;
  std::uint64_t global_enrollments = 0;
  std::uint64_t exceptions = 0;
  std::uint64_t sons_formed = 0;
  std::uint64_t completed = 0;
  std::uint64_t unfulfilled = 0;

  std::uint64_t houses_ignited = 0;
  std::uint64_t houses_burned_down = 0;
  std::uint64_t houses_saved = 0;

  std::uint64_t patients = 0;
  std::uint64_t treated = 0;
  std::uint64_t untreated = 0;
  double mean_wait_ticks = 0.0;

  std::uint64_t alarms = 0;
  std::uint64_t true_falls = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t dispatches = 0;
  std::uint64_t verified_dismissals = 0;
  std::uint64_t alarms_handled = 0;
  double mean_response_ticks = 0.0;

  /// Counter names and values in frozen column order.
  std::vector<std::pair<std::string, double>> numeric_fields() const;
};

Json metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const Json& j);
std::string metrics_csv_header();
std::string metrics_csv_row(const Metrics& m);

struct RunResult {
  Metrics metrics;
  std::vector<TraceRecord> trace;
};

/// Deterministic: equal configs produce byte-identical traces and metrics.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Signed per-counter deltas, b minus a. Scenario kinds must agree.
Json compare_runs(const Metrics& a, const Metrics& b);

struct SweepRow {
  std::uint64_t seed = 0;
  Metrics with_cooperation;
  Metrics without_cooperation;
};

/// Paired runs over seeds base.seed .. base.seed+n-1, toggling cooperation.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, int n_seeds);

}  // namespace fso
