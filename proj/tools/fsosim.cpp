// fsosim: validate organization specs, run the scenarios, sweep seeds,
// check mutualistic preconditions, and compare metrics files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fso/json_io.hpp"
#include "fso/mutualism.hpp"
#include "fso/sim.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 64;
constexpr int kParse = 65;
constexpr int kValidation = 66;
constexpr int kRuntime = 70;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string dir_of(const std::string& path) {
  std::filesystem::path p(path);
  auto parent = p.parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

int cmd_validate(const std::string& path) {
  fso::Fso f = fso::build_fso(fso::hierarchy_from_json(fso::load_json_file(path)));
  std::printf("valid: %d levels, %zu SoCs, %zu actors\n", f.root_level, f.socs.size(),
              f.actor_count());
  return kOk;
}

std::string summary_line(const fso::Metrics& m) {
  std::string s = m.scenario + " seed=" + std::to_string(m.seed) +
                  " cooperation=" + (m.cooperation ? "on" : "off") +
                  ": requests=" + std::to_string(m.requests) +
                  " sons=" + std::to_string(m.sons_formed) +
                  " exceptions=" + std::to_string(m.exceptions) +
                  " unfulfilled=" + std::to_string(m.unfulfilled);
  char extra[160] = "";
  if (m.scenario == "fire")
    std::snprintf(extra, sizeof extra, " | ignited=%llu burned=%llu saved=%llu",
                  (unsigned long long)m.houses_ignited, (unsigned long long)m.houses_burned_down,
                  (unsigned long long)m.houses_saved);
  else if (m.scenario == "healthcare")
    std::snprintf(extra, sizeof extra, " | patients=%llu treated=%llu untreated=%llu wait=%.2f",
                  (unsigned long long)m.patients, (unsigned long long)m.treated,
                  (unsigned long long)m.untreated, m.mean_wait_ticks);
  else if (m.scenario == "falls")
    std::snprintf(extra, sizeof extra,
                  " | alarms=%llu dispatched=%llu dismissed=%llu response=%.2f",
                  (unsigned long long)m.alarms, (unsigned long long)m.dispatches,
                  (unsigned long long)m.verified_dismissals, m.mean_response_ticks);
  return s + extra;
}

struct RunArgs {
  std::string config_path;
  std::int64_t seed = -1;
  std::string json_path, csv_path, trace_path;
};

int cmd_run(const RunArgs& args) {
  fso::ScenarioConfig cfg = fso::scenario_from_json(fso::load_json_file(args.config_path),
                                                    dir_of(args.config_path));
  if (args.seed >= 0) cfg.seed = std::uint64_t(args.seed);
  fso::RunResult out = fso::run_scenario(cfg);
  std::printf("%s\n", summary_line(out.metrics).c_str());

  std::string metrics = fso::metrics_to_json(out.metrics).dump(2) + "\n";
  if (args.json_path.empty())
    std::fputs(metrics.c_str(), stdout);
  else
    write_file(args.json_path, metrics);
  if (!args.csv_path.empty())
    write_file(args.csv_path,
               fso::metrics_csv_header() + "\n" + fso::metrics_csv_row(out.metrics) + "\n");
  if (!args.trace_path.empty()) write_file(args.trace_path, fso::trace_to_jsonl(out.trace));
  return kOk;
}

struct SweepArgs {
  std::string config_path;
  int seeds = 0;
  std::string toggle = "cooperation";
  std::string csv_path;
};

int cmd_sweep(const SweepArgs& args) {
  if (args.toggle != "cooperation")
    throw CLI::ValidationError("--toggle", "only 'cooperation' can be toggled");
  fso::ScenarioConfig base = fso::scenario_from_json(fso::load_json_file(args.config_path),
                                                     dir_of(args.config_path));
  auto rows = fso::run_sweep(base, args.seeds);

  std::string csv = fso::metrics_csv_header() + "\n";
  fso::Metrics acc_on, acc_off;
  for (const auto& row : rows) {
    csv += fso::metrics_csv_row(row.with_cooperation) + "\n";
    csv += fso::metrics_csv_row(row.without_cooperation) + "\n";
    fso::Json delta = fso::compare_runs(row.without_cooperation, row.with_cooperation);
    std::printf("seed %llu: %s\n", (unsigned long long)row.seed,
                delta["deltas"].dump().c_str());
  }
  // aggregate means over the sweep, on minus off
  auto on0 = rows[0].with_cooperation.numeric_fields();
  std::printf("aggregate over %zu paired seeds (cooperation on vs off):\n", rows.size());
  for (std::size_t i = 0; i < on0.size(); ++i) {
    double mean_on = 0, mean_off = 0;
    for (const auto& row : rows) {
      mean_on += row.with_cooperation.numeric_fields()[i].second;
      mean_off += row.without_cooperation.numeric_fields()[i].second;
    }
    mean_on /= double(rows.size());
    mean_off /= double(rows.size());
    if (mean_on == 0.0 && mean_off == 0.0) continue;
    std::printf("  %-22s on=%.3f off=%.3f delta=%+.3f\n", on0[i].first.c_str(), mean_on,
                mean_off, mean_on - mean_off);
  }
  if (!args.csv_path.empty()) write_file(args.csv_path, csv);
  return kOk;
}

int cmd_mp_check(const std::string& path, bool chain) {
  fso::BehaviorModel model = fso::behavior_model_from_json(fso::load_json_file(path));
  auto find_system = [&](const std::string& id) -> const fso::BehaviorSystem& {
    for (const auto& s : model.systems)
      if (s.id == id) return s;
    fso::fail(fso::Errc::unknown_id, id, "model declares no system '" + id + "'");
  };

  if (chain) {
    if (model.systems.size() < 2 || model.actions.size() + 1 != model.systems.size())
      fso::fail(fso::Errc::parse, path, "a chain model needs n systems and n-1 actions");
    auto witness = fso::check_chain_mp(model.systems, model.actions);
    if (!witness) {
      std::printf("no MP along the %zu-system chain\n", model.systems.size());
      return kOk;
    }
    std::printf("MP holds along the chain %s .. %s\n", model.systems.front().id.c_str(),
                model.systems.back().id.c_str());
    std::printf("  forward witness:  %s (in %s)\n", witness->forward_behavior.c_str(),
                model.systems.front().id.c_str());
    std::printf("  backward witness: %s (in %s)\n", witness->backward_behavior.c_str(),
                model.systems.back().id.c_str());
    return kOk;
  }

  if (model.actions.size() != 1)
    fso::fail(fso::Errc::parse, path, "pairwise check needs exactly one action");
  const fso::SocialAction& act = model.actions[0];
  const fso::BehaviorSystem& d = find_system(act.domain);
  const fso::BehaviorSystem& r = find_system(act.range);
  auto witness = fso::check_mp(d, r, act);
  if (!witness) {
    std::printf("no MP between %s and %s\n", d.id.c_str(), r.id.c_str());
    return kOk;
  }
  std::printf("MP holds between %s and %s\n", d.id.c_str(), r.id.c_str());
  std::printf("  forward witness:  %s -> %s\n", witness->forward_behavior.c_str(),
              act.apply(witness->forward_behavior).c_str());
  std::printf("  backward witness: %s <- %s\n", act.invert(witness->backward_behavior).c_str(),
              witness->backward_behavior.c_str());
  return kOk;
}

int cmd_report(const std::string& a_path, const std::string& b_path) {
  fso::Metrics a = fso::metrics_from_json(fso::load_json_file(a_path));
  fso::Metrics b = fso::metrics_from_json(fso::load_json_file(b_path));
  fso::Json delta = fso::compare_runs(a, b);
  std::printf("%s\n", delta.dump(2).c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractal social organization simulator"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a hierarchy spec file");
  validate->add_option("spec", validate_path, "hierarchy JSON file")->required();

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run one scenario");
  run->add_option("config", run_args.config_path, "scenario config JSON")->required();
  run->add_option("--seed", run_args.seed, "override the config seed");
  run->add_option("--json", run_args.json_path, "write metrics JSON here (default: stdout)");
  run->add_option("--out", run_args.csv_path, "write a one-row metrics CSV");
  run->add_option("--trace", run_args.trace_path, "write the event trace (JSON lines)");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "paired cooperation on/off runs over seeds");
  sweep->add_option("config", sweep_args.config_path, "scenario config JSON")->required();
  sweep->add_option("--seeds", sweep_args.seeds, "number of paired seeds")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--toggle", sweep_args.toggle, "parameter to toggle (cooperation)");
  sweep->add_option("--out", sweep_args.csv_path, "write all runs as CSV");

  std::string mp_path;
  bool mp_chain = false;
  CLI::App* mp = app.add_subcommand("mp-check", "check the mutualistic precondition");
  mp->add_option("model", mp_path, "behavior model JSON")->required();
  mp->add_flag("--chain", mp_chain, "evaluate the chain over the declared system order");

  std::string report_a, report_b;
  CLI::App* report = app.add_subcommand("report", "signed metric deltas, b minus a");
  report->add_option("a", report_a, "baseline metrics JSON")->required();
  report->add_option("b", report_b, "comparison metrics JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_path);
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (mp->parsed()) return cmd_mp_check(mp_path, mp_chain);
    if (report->parsed()) return cmd_report(report_a, report_b);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const fso::FsoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == fso::Errc::parse ? kParse : kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
