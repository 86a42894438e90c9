#include "mppi/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "mppi/io.h"
#include "mppi/parallel.h"
#include "mppi/report.h"
#include "mppi/simulator.h"

namespace mppi {
namespace {

PlannerConfig ConfigOrDefault(const std::optional<std::string>& file) {
  return file ? LoadConfig(*file) : PlannerConfig{};
}

double Percentile95(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(samples.size())));
  return samples[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace

int CmdSimulate(const SimulateArgs& args, std::ostream& out,
                std::ostream& err) {
  PlannerConfig config;
  SimulationOptions options;
  std::optional<Scenario> scenario;
  try {
    config = ConfigOrDefault(args.config_file);
    if (args.seed) config.seed = *args.seed;
    scenario.emplace(ResolveScenario(args.scenario));
    options.plant_dt = args.plant_dt;
    options.replan_hz = args.replan_hz;
    options.Validate();
    std::filesystem::create_directories(args.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const SimulationLog log = Run(*scenario, config, options);
  try {
    const std::string csv_file = args.out_dir + "/trajectory.csv";
    std::ofstream csv(csv_file, std::ios::binary);
    WriteTrajectoryCsv(csv, log);
    std::ofstream metrics(args.out_dir + "/metrics.json", std::ios::binary);
    metrics << MetricsJson(log.summary);
    if (!csv || !metrics) throw InputError("cannot write to " + args.out_dir);
    WritePlots(args.out_dir, *scenario, log, config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const SimulationSummary& s = log.summary;
  out << scenario->name << " seed " << config.seed << ": "
      << TerminationName(s.termination) << ", completed "
      << (s.completed ? "yes" : "no") << ", min d_obj " << s.min_d_obj
      << " m, max speed " << s.max_speed << " m/s, p95 cycle "
      << s.p95_cycle_ms << " ms\n";
  if (s.collision) return kExitCollision;
  if (s.termination == Termination::kPlannerFault) return kExitPlannerFault;
  if (!s.completed) return kExitIncomplete;
  return kExitOk;
}

int CmdPlanOnce(const PlanOnceArgs& args, std::ostream& out,
                std::ostream& err) {
  try {
    PlannerConfig config = ConfigOrDefault(args.config_file);
    if (args.workers) {
      if (*args.workers < 0) throw InputError("--workers must be >= 0");
      config.workers = *args.workers;
    }
    const VehicleState state = LoadState(args.state_file);
    const Scenario scene_file = LoadScenario(args.scene_file);
    config.weights.avoidance_gate = scene_file.avoidance_gate;

    Scene scene;
    scene.tracks = scene_file.obstacles;
    scene.inflation_margin = config.inflation_margin;
    MppiPlanner planner(config);
    const CycleResult result =
        planner.PlanCycle(state, scene, scene_file.path, planner.ZeroSequence());
    if (result.status != CycleStatus::kOk) {
      err << "error: planning cycle produced non-finite costs\n";
      return kExitPlannerFault;
    }
    WritePlanCsv(out, result.trajectory, config.dt);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

BenchSample BenchPlanCycle(const PlannerConfig& config, int repeats) {
  const Scenario scenario = BuiltinScenario("object_avoidance");
  PlannerConfig c = config;
  c.weights.avoidance_gate = scenario.avoidance_gate;
  Scene scene;
  scene.tracks = scenario.obstacles;
  scene.inflation_margin = c.inflation_margin;
  MppiPlanner planner(c);

  InputSequence warm = planner.ZeroSequence();
  // Untimed cycle to fault in memory and produce a realistic warm start.
  warm = planner.PlanCycle(scenario.initial_state, scene, scenario.path, warm)
             .next_warm;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(std::max(repeats, 1)));
  for (int i = 0; i < std::max(repeats, 1); ++i) {
    const auto start = std::chrono::steady_clock::now();
    CycleResult r =
        planner.PlanCycle(scenario.initial_state, scene, scenario.path, warm);
    samples.push_back(std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count());
    if (r.status == CycleStatus::kOk) warm = std::move(r.next_warm);
  }
  BenchSample sample;
  sample.num_rollouts = c.num_rollouts;
  sample.horizon = c.horizon;
  double sum = 0.0;
  for (double s : samples) sum += s;
  sample.mean_ms = sum / static_cast<double>(samples.size());
  sample.p95_ms = samples.size() == 1 ? sample.mean_ms : Percentile95(samples);
  sample.rollouts_per_s = c.num_rollouts / (sample.mean_ms * 1e-3);
  return sample;
}

BenchReport RunBench(const PlannerConfig& config, int repeats) {
  BenchReport report;
  report.hardware_threads = std::thread::hardware_concurrency();
  report.workers = ResolveWorkers(config.workers);
  report.main = BenchPlanCycle(config, repeats);
  for (int m : {320, 640, 1280, 2560}) {
    PlannerConfig c = config;
    c.num_rollouts = m;
    report.sweep.push_back(BenchPlanCycle(c, repeats));
  }
  return report;
}

int CmdBench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  PlannerConfig config;
  try {
    config = ConfigOrDefault(args.config_file);
    if (args.repeats < 1) throw InputError("--repeats must be >= 1");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const BenchReport report = RunBench(config, args.repeats);
  const auto line = [&out](const BenchSample& s) {
    out << "M=" << s.num_rollouts << " T=" << s.horizon << " mean_ms=" << s.mean_ms
        << " p95_ms=" << s.p95_ms << " rollouts_per_s=" << s.rollouts_per_s
        << "\n";
  };
  out << "hardware_threads=" << report.hardware_threads
      << " workers=" << report.workers << " repeats=" << args.repeats << "\n";
  line(report.main);
  out << "sweep:\n";
  for (const BenchSample& s : report.sweep) line(s);
  return kExitOk;
}

}  // namespace mppi
