#ifndef MPPI_SIMULATOR_H_
#define MPPI_SIMULATOR_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mppi/planner.h"
#include "mppi/scene.h"
#include "mppi/vehicle_dynamics.h"

namespace mppi {

inline constexpr double kLaneWidth = 3.5;  // m

struct Scenario {
  std::string name = "custom";
  ReferencePath path;
  std::vector<ObstacleTrack> obstacles;
  VehicleState initial_state;
  double duration = 20.0;  // s
  bool avoidance_gate = false;
  // Ego body, centered on the reference point. Only used for reporting
  // clearances; the planner treats the ego as a point.
  double ego_length = 4.5;
  double ego_width = 1.8;

  // Throws std::invalid_argument on a non-positive duration or a non-finite
  // initial state.
  void Validate() const;
};

// One of "lane_merge", "object_avoidance", "vehicle_following".
// Throws std::invalid_argument for any other name.
Scenario BuiltinScenario(std::string_view name);
std::vector<std::string> BuiltinScenarioNames();

// Per-channel half-widths of a uniform plant disturbance.
struct DisturbanceBound {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double delta = 0.0;

  bool IsZero() const {
    return x == 0.0 && y == 0.0 && theta == 0.0 && v == 0.0 && delta == 0.0;
  }
};

// Adds U(-bound, bound) noise per channel, then re-wraps yaw and clamps the
// speed at zero. A zero bound consumes no random numbers.
VehicleState InjectDisturbance(const VehicleState& state,
                               const DisturbanceBound& bound,
                               std::mt19937_64& rng);

struct SimulationOptions {
  double plant_dt = 0.05;   // s
  double replan_hz = 20.0;  // Hz
  DisturbanceBound disturbance;
  std::uint64_t disturbance_seed = 0;
  double goal_radius = 2.0;       // m
  double goal_speed = 0.3;        // m/s
  int max_consecutive_faults = 3;

  // Throws std::invalid_argument unless plant_dt divides the replanning
  // period.
  void Validate() const;
  int TicksPerReplan() const;
};

struct TickRecord {
  double t = 0.0;  // s
  VehicleState state;
  ControlInput command;  // held over [t, t + plant_dt)
  double d_obj = 0.0;    // m, +inf without obstacles
  double cycle_ms = 0.0; // 0 on ticks without a planning cycle
  bool planned = false;
};

enum class Termination { kDuration, kGoalReached, kCollision, kPlannerFault };

struct SimulationSummary {
  double min_d_obj = 0.0;
  double max_speed = 0.0;
  double max_abs_accel = 0.0;
  double max_abs_steer = 0.0;
  double mean_cycle_ms = 0.0;
  double p95_cycle_ms = 0.0;
  double max_cycle_ms = 0.0;
  int planner_faults = 0;
  bool collision = false;
  // Goal reached, or duration elapsed with the vehicle still moving, with
  // no collision and no planner abort.
  bool completed = false;
  Termination termination = Termination::kDuration;
};

struct SimulationLog {
  // One record per plant tick plus a closing record holding the final state
  // with a zero command.
  std::vector<TickRecord> records;
  // Obstacle footprints at t = 0, for plotting.
  std::vector<ObstacleTrack> initial_obstacles;
  SimulationSummary summary;
};

std::string_view TerminationName(Termination t);

// Receding-horizon loop: replans at options.replan_hz from the plant state,
// holds each planned input for one planner step, and integrates the plant
// with the same bicycle model at options.plant_dt.
SimulationLog Run(const Scenario& scenario, const PlannerConfig& config,
                  const SimulationOptions& options = {});

// Summary statistics over a log's records. p95 uses the nearest-rank
// definition over planning ticks.
SimulationSummary Summarize(const std::vector<TickRecord>& records);

}  // namespace mppi

#endif  // MPPI_SIMULATOR_H_
