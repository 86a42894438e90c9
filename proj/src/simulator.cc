#include "mppi/simulator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mppi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Straight lane along +x at height y.
std::vector<Vec2> StraightLine(double x0, double x1, double y, double step) {
  std::vector<Vec2> points;
  for (double x = x0; x <= x1 + 1e-9; x += step) points.push_back({x, y});
  return points;
}

// Quintic smoothstep: zero slope and curvature at both ends.
double SmoothStep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

ObstacleTrack ParkedCar(double x, double y) {
  ObstacleTrack car;
  car.footprint = {{x, y}, 0.0, 4.5, 1.8};
  car.kind = ObstacleKind::kStatic;
  return car;
}

Scenario LaneMerge() {
  // Target lane along y = 0; the vehicle starts at rest on the parallel lane
  // one lane width to the left.
  const double v = 30.0 * kKmhToMps;
  const auto lane = StraightLine(-10.0, 400.0, 0.0, 0.5);
  return Scenario{.name = "lane_merge",
                  .path = ReferencePath::FromPolyline(lane, v),
                  .obstacles = {},
                  .initial_state = {0.0, kLaneWidth, 0.0, 0.0, 0.0},
                  .duration = 20.0,
                  .avoidance_gate = false};
}

Scenario ObjectAvoidance() {
  // A parked car blocks the lane 60 m ahead. The reference path swings
  // left far enough to pass body-to-body with a 0.7 m gap.
  constexpr double kObstacleX = 60.0;
  constexpr double kGap = 0.7;
  constexpr double kCarWidth = 1.8;
  const double offset = kGap + kCarWidth;  // two half widths plus the gap
  const double v = 30.0 * kKmhToMps;

  std::vector<Vec2> points;
  for (double x = -10.0; x <= 300.0 + 1e-9; x += 0.5) {
    double y = 0.0;
    if (x < kObstacleX) {
      y = offset * SmoothStep((x - (kObstacleX - 40.0)) / 28.0);
    } else {
      y = offset * (1.0 - SmoothStep((x - (kObstacleX + 12.0)) / 28.0));
    }
    points.push_back({x, y});
  }
  return Scenario{.name = "object_avoidance",
                  .path = ReferencePath::FromPolyline(points, v),
                  .obstacles = {ParkedCar(kObstacleX, 0.0)},
                  .initial_state = {0.0, 0.0, 0.0, v, 0.0},
                  .duration = 20.0,
                  .avoidance_gate = true};
}

Scenario VehicleFollowing() {
  // Same parked car, but the path stays in lane and the full safe-distance
  // cost applies, so the vehicle has to stop behind it.
  const double v = 30.0 * kKmhToMps;
  const auto lane = StraightLine(-10.0, 300.0, 0.0, 0.5);
  return Scenario{.name = "vehicle_following",
                  .path = ReferencePath::FromPolyline(lane, v),
                  .obstacles = {ParkedCar(60.0, 0.0)},
                  .initial_state = {0.0, 0.0, 0.0, v, 0.0},
                  .duration = 20.0,
                  .avoidance_gate = false};
}

double DistanceToObstacles(const VehicleState& s,
                           const std::vector<ObstacleTrack>& tracks, double t,
                           double margin) {
  double best = kInf;
  for (const ObstacleTrack& track : tracks) {
    const auto circles = Predict(track, t, margin);
    best = std::min(best, MinObstacleDistance({s.x, s.y}, circles));
  }
  return best;
}

}  // namespace

void Scenario::Validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("scenario duration must be positive");
  }
  const VehicleState& s = initial_state;
  for (double v : {s.x, s.y, s.theta, s.v, s.delta}) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("scenario initial state must be finite");
    }
  }
  if (s.v < 0.0) {
    throw std::invalid_argument("scenario initial speed must be >= 0");
  }
  if (!(ego_length > 0.0) || !(ego_width > 0.0)) {
    throw std::invalid_argument("ego dimensions must be positive");
  }
  for (const ObstacleTrack& track : obstacles) Decompose(track, 0.0);
}

Scenario BuiltinScenario(std::string_view name) {
  if (name == "lane_merge") return LaneMerge();
  if (name == "object_avoidance") return ObjectAvoidance();
  if (name == "vehicle_following") return VehicleFollowing();
  throw std::invalid_argument("unknown scenario: " + std::string(name));
}

std::vector<std::string> BuiltinScenarioNames() {
  return {"lane_merge", "object_avoidance", "vehicle_following"};
}

VehicleState InjectDisturbance(const VehicleState& state,
                               const DisturbanceBound& bound,
                               std::mt19937_64& rng) {
  if (bound.IsZero()) return state;
  const auto perturb = [&rng](double value, double half_width) {
    if (half_width <= 0.0) return value;
    std::uniform_real_distribution<double> u(-half_width, half_width);
    return value + u(rng);
  };
  VehicleState out;
  out.x = perturb(state.x, bound.x);
  out.y = perturb(state.y, bound.y);
  out.theta = WrapAngle(perturb(state.theta, bound.theta));
  out.v = std::max(0.0, perturb(state.v, bound.v));
  out.delta = perturb(state.delta, bound.delta);
  return out;
}

void SimulationOptions::Validate() const {
  if (!(plant_dt > 0.0) || !(replan_hz > 0.0)) {
    throw std::invalid_argument("plant_dt and replan rate must be positive");
  }
  const double period = 1.0 / replan_hz;
  const double ticks = std::round(period / plant_dt);
  if (ticks < 1.0 || std::abs(ticks * plant_dt - period) > 1e-9) {
    throw std::invalid_argument(
        "plant_dt must divide the replanning period");
  }
  if (max_consecutive_faults < 1) {
    throw std::invalid_argument("max_consecutive_faults must be >= 1");
  }
}

int SimulationOptions::TicksPerReplan() const {
  return static_cast<int>(std::round(1.0 / replan_hz / plant_dt));
}

std::string_view TerminationName(Termination t) {
  switch (t) {
    case Termination::kDuration:
      return "duration";
    case Termination::kGoalReached:
      return "goal_reached";
    case Termination::kCollision:
      return "collision";
    case Termination::kPlannerFault:
      return "planner_fault";
  }
  return "unknown";
}

SimulationLog Run(const Scenario& scenario, const PlannerConfig& config,
                  const SimulationOptions& options) {
  scenario.Validate();
  options.Validate();
  PlannerConfig planner_config = config;
  planner_config.weights.avoidance_gate = scenario.avoidance_gate;
  MppiPlanner planner(planner_config);

  VehicleParams plant = planner_config.vehicle();
  plant.dt = options.plant_dt;
  const int ticks_per_replan = options.TicksPerReplan();
  const auto total_ticks =
      static_cast<long>(std::round(scenario.duration / options.plant_dt));
  const double margin = planner_config.inflation_margin;
  const Vec2 target = scenario.path.target();
  std::mt19937_64 disturbance_rng(options.disturbance_seed);

  SimulationLog log;
  log.initial_obstacles = scenario.obstacles;
  log.records.reserve(static_cast<std::size_t>(total_ticks) + 1);

  VehicleState state = scenario.initial_state;
  InputSequence warm = planner.ZeroSequence();
  PlannedTrajectory plan;
  long plan_tick = 0;
  int consecutive_faults = 0;
  int faults = 0;
  Termination termination = Termination::kDuration;

  long tick = 0;
  for (; tick < total_ticks; ++tick) {
    const double t = tick * options.plant_dt;
    TickRecord record;
    record.t = t;
    record.state = state;
    record.d_obj = DistanceToObstacles(state, scenario.obstacles, t, margin);

    if (tick % ticks_per_replan == 0) {
      Scene scene;
      scene.inflation_margin = margin;
      for (const ObstacleTrack& track : scenario.obstacles) {
        scene.tracks.push_back(Advance(track, t));
      }
      CycleResult cycle = planner.PlanCycle(state, scene, scenario.path, warm);
      if (cycle.status == CycleStatus::kOk) {
        plan = std::move(cycle.trajectory);
        warm = std::move(cycle.next_warm);
        plan_tick = tick;
        consecutive_faults = 0;
        record.planned = true;
        record.cycle_ms = plan.compute_ms;
      } else {
        ++faults;
        if (++consecutive_faults >= options.max_consecutive_faults ||
            plan.inputs.empty()) {
          termination = Termination::kPlannerFault;
          break;
        }
      }
    }

    // Zero-order hold over each planner step of the active plan.
    const double elapsed = (tick - plan_tick) * options.plant_dt;
    const auto step_index = std::min(
        static_cast<std::size_t>(elapsed / planner_config.dt + 1e-9),
        plan.inputs.size() - 1);
    record.command = plan.inputs[step_index];
    log.records.push_back(record);

    state = InjectDisturbance(Step(state, record.command, plant),
                              options.disturbance, disturbance_rng);
    const double t_next = (tick + 1) * options.plant_dt;
    if (DistanceToObstacles(state, scenario.obstacles, t_next, margin) <= 0.0) {
      termination = Termination::kCollision;
      ++tick;
      break;
    }
    if (std::hypot(state.x - target.x, state.y - target.y) <=
            options.goal_radius &&
        state.v < options.goal_speed) {
      termination = Termination::kGoalReached;
      ++tick;
      break;
    }
  }

  TickRecord last;
  last.t = tick * options.plant_dt;
  last.state = state;
  last.d_obj = DistanceToObstacles(state, scenario.obstacles, last.t, margin);
  log.records.push_back(last);

  log.summary = Summarize(log.records);
  log.summary.planner_faults = faults;
  log.summary.termination = termination;
  log.summary.collision = termination == Termination::kCollision;
  log.summary.completed =
      termination == Termination::kGoalReached ||
      (termination == Termination::kDuration &&
       state.v >= options.goal_speed);
  return log;
}

SimulationSummary Summarize(const std::vector<TickRecord>& records) {
  SimulationSummary s;
  s.min_d_obj = kInf;
  std::vector<double> cycles;
  for (const TickRecord& r : records) {
    s.min_d_obj = std::min(s.min_d_obj, r.d_obj);
    s.max_speed = std::max(s.max_speed, r.state.v);
    s.max_abs_accel = std::max(s.max_abs_accel, std::abs(r.command.a));
    s.max_abs_steer = std::max(s.max_abs_steer, std::abs(r.state.delta));
    if (r.planned) cycles.push_back(r.cycle_ms);
  }
  if (!cycles.empty()) {
    double sum = 0.0;
    for (double c : cycles) sum += c;
    s.mean_cycle_ms = sum / static_cast<double>(cycles.size());
    std::sort(cycles.begin(), cycles.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(cycles.size())));
    s.p95_cycle_ms = cycles[std::max<std::size_t>(rank, 1) - 1];
    s.max_cycle_ms = cycles.back();
  }
  s.collision = s.min_d_obj <= 0.0;
  return s;
}

}  // namespace mppi
