// orbitgrasp: run, validate, linearize and sweep capture scenarios.
//
// Exit codes: 0 success (capture achieved for run), 2 capture not achieved,
// 1 any error (bad arguments, unreadable or invalid scenario).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orbitgrasp/config.hpp"
#include "orbitgrasp/dynamics.hpp"
#include "orbitgrasp/scenario.hpp"
#include "orbitgrasp/sim.hpp"
#include "orbitgrasp/sweep.hpp"

namespace fs = std::filesystem;
using namespace orbitgrasp;

namespace {

struct Common {
  std::string scenario;
  std::string out;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("scenario", c.scenario, "Scenario file (.cfg)")->required();
  cmd->add_option("--set", c.overrides, "Override a scenario key, KEY=VALUE (repeatable)")
      ->allow_extra_args(false);
  cmd->add_flag("--quiet", c.quiet, "Only report errors");
}

void add_out(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output directory (default: $ORBITGRASP_OUT or .)");
}

fs::path output_dir(const Common& c) {
  fs::path dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("ORBITGRASP_OUT");
    dir = env && *env ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

ConfigDocument load_document(const Common& c) {
  if (!fs::exists(c.scenario)) throw Error("scenario file '" + c.scenario + "' does not exist");
  ConfigDocument doc = ConfigDocument::load(c.scenario);
  apply_overrides(doc, c.overrides);
  return doc;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  return f;
}

std::string stem(const Common& c) { return fs::path(c.scenario).stem().string(); }

int cmd_validate(const Common& c) {
  scenario_from_config(load_document(c));
  if (!c.quiet) std::cout << c.scenario << ": ok\n";
  return 0;
}

int cmd_run(const Common& c, int decimation) {
  ScenarioConfig cfg = scenario_from_config(load_document(c));
  if (decimation > 0) cfg.decimation = decimation;
  const fs::path dir = output_dir(c);
  const fs::path csv = dir / (stem(c) + ".csv");
  const fs::path metrics = dir / (stem(c) + ".metrics");

  const auto t0 = std::chrono::steady_clock::now();
  std::ofstream tel = open_out(csv);
  const RunMetrics m = run_scenario(cfg, &tel);
  tel.close();
  std::ofstream met = open_out(metrics);
  write_metrics(met, cfg, m);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (m.aborted) std::cerr << "simulation aborted at t=" << m.abort_time << ": " << m.abort_cause << '\n';
  if (!c.quiet) {
    std::cout << (m.captured ? "capture achieved" : "capture NOT achieved")
              << ": position error " << m.capture_position_error << " m, attitude error "
              << m.capture_attitude_error << ", saturated samples " << m.saturated_total()
              << ", wall time " << wall << " s\n"
              << "wrote " << csv.string() << " and " << metrics.string() << '\n';
  }
  return exit_code(m);
}

int cmd_linearize(const Common& c, const std::string& time_text) {
  const ScenarioConfig cfg = scenario_from_config(load_document(c));
  double t = cfg.guidance.timeline.t_grasp;
  if (!time_text.empty()) {
    size_t used = 0;
    try {
      t = std::stod(time_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != time_text.size() || !std::isfinite(t) || t < 0.0) {
      throw Error("--time: '" + time_text + "' is not a time >= 0");
    }
  }
  const SystemState snapshot = state_at(cfg, t);
  const LinearizedPlant plant = linearize(controller_model(cfg), snapshot);
  const fs::path path = output_dir(c) / (stem(c) + ".linearized.txt");
  std::ofstream f = open_out(path);
  write_linearized(f, plant);
  if (!c.quiet) std::cout << "linearized at t=" << t << ", wrote " << path.string() << '\n';
  return 0;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& vary) {
  const ConfigDocument doc = load_document(c);
  scenario_from_config(doc);
  if (vary.empty()) throw Error("sweep needs at least one --vary KEY=v1,v2,...");
  std::vector<SweepAxis> axes;
  for (const std::string& v : vary) {
    axes.push_back(parse_sweep_axis(v));
    if (!find_key_spec(axes.back().key)) throw ConfigError(axes.back().key, 0, "unknown key in --vary");
  }
  const std::vector<SweepRow> rows = run_sweep(doc, axes);
  const fs::path path = output_dir(c) / (stem(c) + ".sweep.csv");
  std::ofstream f = open_out(path);
  write_sweep_csv(f, axes, rows);
  int failed = 0;
  for (const SweepRow& r : rows) failed += r.status == 1;
  if (!c.quiet) {
    std::cout << rows.size() << " runs (" << failed << " errors), wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical capture controller simulator"};
  app.require_subcommand(1);

  Common c;
  int decimation = 0;
  std::string time_text;
  std::vector<std::string> vary;

  CLI::App* run = app.add_subcommand("run", "Simulate a scenario, write telemetry and metrics");
  add_common(run, c);
  add_out(run, c);
  run->add_option("--decimation", decimation, "Write every N-th step")
      ->check(CLI::PositiveNumber);

  CLI::App* val = app.add_subcommand("validate", "Parse and check a scenario");
  add_common(val, c);

  CLI::App* lin = app.add_subcommand("linearize", "Export the linearized controller plant");
  add_common(lin, c);
  add_out(lin, c);
  lin->add_option("--time", time_text, "Snapshot time in s (default: t_grasp)");

  CLI::App* swp = app.add_subcommand("sweep", "Run the cross product of override lists");
  add_common(swp, c);
  add_out(swp, c);
  swp->add_option("--vary", vary, "KEY=v1,v2,... (repeatable)")->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(c, decimation);
    if (*val) return cmd_validate(c);
    if (*lin) return cmd_linearize(c, time_text);
    if (*swp) return cmd_sweep(c, vary);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
