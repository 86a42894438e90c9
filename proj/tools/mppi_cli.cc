// Command-line front end: simulate, plan-once and bench.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mppi/cli.h"

int main(int argc, char** argv) {
  CLI::App app{"MPPI motion planner for car-like vehicles"};
  app.require_subcommand(1);

  mppi::SimulateArgs sim;
  std::string sim_config;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a closed-loop scenario");
  simulate
      ->add_option("--scenario", sim.scenario,
                   "lane_merge, object_avoidance, vehicle_following or a file")
      ->required();
  auto* sim_config_opt =
      simulate->add_option("--config", sim_config, "Planner config (JSON)");
  auto* sim_seed_opt =
      simulate->add_option("--seed", sim_seed, "Noise seed, overrides config");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--plant-dt", sim.plant_dt, "Plant step [s]");
  simulate->add_option("--hz", sim.replan_hz, "Replanning rate [Hz]");

  mppi::PlanOnceArgs plan;
  std::string plan_config;
  int plan_workers = 0;
  auto* plan_once =
      app.add_subcommand("plan-once", "Run one planning cycle, print CSV");
  plan_once->add_option("--state", plan.state_file, "Vehicle state (JSON)")
      ->required();
  plan_once->add_option("--scene", plan.scene_file, "Path and obstacles (JSON)")
      ->required();
  auto* plan_config_opt =
      plan_once->add_option("--config", plan_config, "Planner config (JSON)");
  auto* plan_workers_opt = plan_once->add_option(
      "--workers", plan_workers, "Worker threads, overrides config");

  mppi::BenchArgs bench;
  std::string bench_config;
  auto* bench_cmd = app.add_subcommand("bench", "Time planning cycles");
  auto* bench_config_opt =
      bench_cmd->add_option("--config", bench_config, "Planner config (JSON)");
  bench_cmd->add_option("--repeats", bench.repeats, "Timed cycles per M");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mppi::kExitUsage;
  }

  if (*simulate) {
    if (*sim_config_opt) sim.config_file = sim_config;
    if (*sim_seed_opt) sim.seed = sim_seed;
    return mppi::CmdSimulate(sim, std::cout, std::cerr);
  }
  if (*plan_once) {
    if (*plan_config_opt) plan.config_file = plan_config;
    if (*plan_workers_opt) plan.workers = plan_workers;
    return mppi::CmdPlanOnce(plan, std::cout, std::cerr);
  }
  if (*bench_config_opt) bench.config_file = bench_config;
  return mppi::CmdBench(bench, std::cout, std::cerr);
}
