// SPDX-License-Identifier: Apache-2.0
//
// liereg-sim: scenario-driven batch simulator.
//
//   liereg-sim run <scenario|preset> --out <dir>
//   liereg-sim batch <glob> --out <dir>
//   liereg-sim batch --seeds N [--base <scenario|preset>] --out <dir>
//   liereg-sim check <scenario|preset>
//   liereg-sim presets list | show <name> | export <dir>
//
// Exit codes: 0 success, 1 validation failure, 2 integration failure.

#include "liereg/sim/runner.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace liereg::sim;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIntegration = 2;

// A preset name or a path to a scenario file.
LoadedScenario resolve(const std::string& arg) {
  if (!std::filesystem::exists(arg)) {
    for (const auto& name : preset_names()) {
      if (name == arg) {
        Scenario s = preset(name);
        ValidationReport rep = validate(s);
        return {std::move(s), std::move(rep)};
      }
    }
  }
  return load_scenario(arg);
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& msg : w) std::cerr << "warning: " << msg << '\n';
}

int cmd_check(const std::string& arg) {
  const LoadedScenario l = resolve(arg);
  print_warnings(l.report.warnings);
  std::cout << "ok: " << l.scenario.name << " (" << to_string(l.scenario.group) << ", "
            << to_string(l.scenario.mode) << ")\n";
  std::cout << "  observability: min cost " << l.report.observability.min_cost << '\n';
  if (l.report.equilibria) {
    const auto& e = *l.report.equilibria;
    std::cout << "  Y eigenvalues: " << e.lambda.transpose() << " (min gap " << e.min_eigen_gap
              << ")\n";
  }
  return kExitOk;
}

int cmd_run(const std::string& arg, const std::string& out) {
  const LoadedScenario l = resolve(arg);
  print_warnings(l.report.warnings);
  const RunResult r = run_scenario(l.scenario, RunOptions{true}, l.report.warnings);
  write_run_outputs(r, l.scenario, out);
  const Summary& s = r.summary;
  std::cout << s.scenario << ": " << to_string(s.status) << " t=" << s.t_final
            << " group_error=" << s.final.group_error << " sum_e_sq=" << s.final.sum_e_sq;
  if (l.scenario.mode == Mode::dynamic_so3_backstep) {
    std::cout << " omega_tilde=" << s.final.omega_tilde_norm;
  }
  std::cout << " (" << s.wall_seconds << " s)\n";
  if (s.status != RunStatus::ok) {
    std::cerr << "integration failure: " << s.failure_message << '\n';
    return kExitIntegration;
  }
  return kExitOk;
}

int cmd_batch(const std::string& pattern, int seeds, std::uint64_t first_seed,
              const std::string& base, const std::string& out, unsigned threads,
              double threshold, bool per_run) {
  std::vector<BatchJob> jobs;
  if (seeds > 0) {
    const LoadedScenario l = resolve(base);
    jobs = jobs_from_seeds(l.scenario, first_seed, seeds);
  } else {
    if (pattern.empty()) throw ScenarioError("batch", "give a glob pattern or --seeds N");
    jobs = jobs_from_files(expand_glob(pattern));
  }
  std::filesystem::create_directories(out);
  std::optional<std::filesystem::path> run_dir;
  if (per_run) run_dir = std::filesystem::path(out) / "runs";
  const std::vector<BatchRow> rows = run_batch(jobs, threads, threshold, run_dir);
  write_aggregate_csv(rows, (std::filesystem::path(out) / "aggregate.csv").string());

  int converged = 0;
  int failed_validation = 0;
  int failed_integration = 0;
  for (const auto& r : rows) {
    converged += r.converged ? 1 : 0;
    failed_validation += r.status == "validation_failure" ? 1 : 0;
    failed_integration += r.status == "integration_failure" ? 1 : 0;
    if (!r.message.empty()) std::cerr << r.run << ": " << r.message << '\n';
  }
  std::cout << converged << "/" << rows.size() << " runs converged (sum_e_sq <= " << threshold
            << ")\n";
  if (failed_integration > 0) return kExitIntegration;
  if (failed_validation > 0) return kExitValidation;
  return kExitOk;
}

int cmd_presets(const std::string& action, const std::string& arg) {
  if (action == "list") {
    for (const auto& n : preset_names()) std::cout << n << "  " << preset_description(n) << '\n';
    return kExitOk;
  }
  if (action == "show") {
    std::cout << scenario_to_json(preset(arg)).dump(2) << '\n';
    return kExitOk;
  }
  if (action == "export") {
    std::filesystem::create_directories(arg);
    for (const auto& n : preset_names()) {
      std::ofstream os(std::filesystem::path(arg) / (n + ".json"));
      os << scenario_to_json(preset(n)).dump(2) << '\n';
    }
    return kExitOk;
  }
  std::cerr << "presets: unknown action '" << action << "' (list, show, export)\n";
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Internal-model regulator simulator on matrix Lie groups"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Simulate one scenario and write its outputs");
  run->add_option("scenario", scenario_arg, "Scenario file or preset name")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  std::string pattern;
  int seeds = 0;
  std::uint64_t first_seed = 1;
  std::string base = "almost_global_base";
  unsigned threads = 0;
  double threshold = 1e-6;
  bool per_run = false;
  auto* batch = app.add_subcommand("batch", "Run many scenarios and write an aggregate CSV");
  batch->add_option("pattern", pattern, "Glob matching scenario files");
  batch->add_option("--seeds", seeds, "Random-attitude sweep over N seeds")->check(CLI::PositiveNumber);
  batch->add_option("--first-seed", first_seed, "First seed of the sweep");
  batch->add_option("--base", base, "Base scenario for a seed sweep")->capture_default_str();
  batch->add_option("--threads", threads, "Worker threads (0: all cores)");
  batch->add_option("--threshold", threshold, "Convergence threshold on sum |e_i|^2")
      ->capture_default_str();
  batch->add_flag("--per-run", per_run, "Also write each run's files under <out>/runs");
  batch->add_option("--out", out_dir, "Output directory")->required();

  auto* check = app.add_subcommand("check", "Run load-time validation only");
  check->add_option("scenario", scenario_arg, "Scenario file or preset name")->required();

  std::string action = "list";
  std::string preset_arg;
  auto* presets = app.add_subcommand("presets", "List, show or export built-in scenarios");
  presets->add_option("action", action, "list | show | export")->capture_default_str();
  presets->add_option("name", preset_arg, "Preset name (show) or directory (export)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(scenario_arg, out_dir);
    if (*batch) {
      return cmd_batch(pattern, seeds, first_seed, base, out_dir, threads, threshold, per_run);
    }
    if (*check) return cmd_check(scenario_arg);
    if (*presets) return cmd_presets(action, preset_arg);
  } catch (const ScenarioError& e) {
    std::cerr << "validation failure [" << e.check() << "]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const liereg::IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << '\n';
    return kExitIntegration;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
