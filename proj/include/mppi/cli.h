#ifndef MPPI_CLI_H_
#define MPPI_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mppi/planner.h"

namespace mppi {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitCollision = 2,
  kExitIncomplete = 3,  // time ran out short of completion, e.g. stalled
  kExitPlannerFault = 4,
};

struct SimulateArgs {
  std::string scenario;  // built-in name or scenario file
  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::string out_dir;
  double plant_dt = 0.05;
  double replan_hz = 20.0;
};

// Runs one scenario and writes trajectory.csv, metrics.json and the SVG
// plots into out_dir (created if missing).
int CmdSimulate(const SimulateArgs& args, std::ostream& out,
                std::ostream& err);

struct PlanOnceArgs {
  std::string state_file;
  std::string scene_file;
  std::optional<std::string> config_file;
  std::optional<int> workers;  // overrides the config worker count
};

// One planning cycle from a zero warm start; the plan goes to `out` as CSV.
int CmdPlanOnce(const PlanOnceArgs& args, std::ostream& out,
                std::ostream& err);

struct BenchSample {
  int num_rollouts = 0;
  int horizon = 0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  double rollouts_per_s = 0.0;
};

struct BenchReport {
  BenchSample main;                  // the configured M
  std::vector<BenchSample> sweep;    // M in {320, 640, 1280, 2560}
  unsigned hardware_threads = 0;
  int workers = 0;
};

// Times planning cycles on the object-avoidance scene, warm-started from
// one untimed cycle.
BenchSample BenchPlanCycle(const PlannerConfig& config, int repeats);
BenchReport RunBench(const PlannerConfig& config, int repeats);

struct BenchArgs {
  std::optional<std::string> config_file;
  int repeats = 20;
};

int CmdBench(const BenchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace mppi

#endif  // MPPI_CLI_H_
