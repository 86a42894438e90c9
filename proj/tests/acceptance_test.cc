// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mppi/cli.h"
#include "mppi/planner.h"
#include "mppi/simulator.h"

namespace {

using namespace mppi;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;
constexpr int kSeeds = 10;
constexpr double kSpeedCeiling = 8.472;           // m/s, 30.5 km/h
constexpr double kWindowLow = 29.0 * kKmhToMps;   // final-quarter band
constexpr double kWindowHigh = 30.0 * kKmhToMps;
constexpr double kSteerLimit = 12.0 * kPi / 180.0;

int failures = 0;

void Report(int id, bool pass, const std::string& detail) {
  std::printf("%s [%2d] %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
std::string Format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ScenarioRuns {
  Scenario scenario;
  std::vector<SimulationLog> logs;  // one per seed
  double seconds = 0.0;
};

ScenarioRuns RunSeeds(const std::string& name) {
  ScenarioRuns runs{BuiltinScenario(name), {}, 0.0};
  const auto start = Clock::now();
  for (int seed = 0; seed < kSeeds; ++seed) {
    PlannerConfig config;
    config.seed = static_cast<std::uint64_t>(seed);
    runs.logs.push_back(Run(runs.scenario, config));
  }
  runs.seconds = Seconds(start);
  return runs;
}

// Criterion 1.
void CheckSpeedCap(const std::vector<ScenarioRuns>& all) {
  bool pass = true;
  double vmax = 0.0, window_min = kWindowHigh, window_max = 0.0, seconds = 0.0;
  std::string why;
  for (const ScenarioRuns& runs : all) {
    seconds += runs.seconds;
    // The following scenario has to come to a stop behind the lead car, so
    // the cruise band only applies to the other two.
    const bool cruise = runs.scenario.name != "vehicle_following";
    for (std::size_t seed = 0; seed < runs.logs.size(); ++seed) {
      const SimulationLog& log = runs.logs[seed];
      const double t_end = log.records.back().t;
      for (const TickRecord& r : log.records) {
        vmax = std::max(vmax, r.state.v);
        if (r.state.v > kSpeedCeiling || r.state.v > kWindowHigh) {
          pass = false;
          why = Format("%s seed %zu v=%.6f at t=%.2f", runs.scenario.name.c_str(),
                       seed, r.state.v, r.t);
        }
        if (cruise && r.t >= 0.75 * t_end) {
          window_min = std::min(window_min, r.state.v);
          window_max = std::max(window_max, r.state.v);
          if (r.state.v < kWindowLow) {
            pass = false;
            why = Format("%s seed %zu v=%.4f below band at t=%.2f",
                         runs.scenario.name.c_str(), seed, r.state.v, r.t);
          }
        }
      }
    }
  }
  if (seconds >= 120.0) {
    pass = false;
    why = "runtime over 2 min";
  }
  Report(1, pass,
         Format("speed cap: max v %.6f m/s (limit %.3f), final-quarter v in "
                "[%.4f, %.4f] m/s, 30 runs in %.1f s",
                vmax, kSpeedCeiling, window_min, window_max, seconds) +
             (why.empty() ? "" : "; " + why));
}

// Criterion 2. Clearance between body rectangles while they overlap in x.
void CheckAvoidance(const ScenarioRuns& runs) {
  const Footprint& car = runs.scenario.obstacles.at(0).footprint;
  const double half_l = 0.5 * (runs.scenario.ego_length + car.length);
  const double half_w = 0.5 * (runs.scenario.ego_width + car.width);
  bool pass = runs.seconds < 60.0;
  double min_d = std::numeric_limits<double>::infinity();
  double min_lateral = std::numeric_limits<double>::infinity();
  for (const SimulationLog& log : runs.logs) {
    bool passed_car = false;
    for (const TickRecord& r : log.records) {
      min_d = std::min(min_d, r.d_obj);
      if (std::abs(r.state.x - car.center.x) <= half_l) {
        min_lateral =
            std::min(min_lateral, std::abs(r.state.y - car.center.y) - half_w);
      }
      if (r.state.x > car.center.x + half_l) passed_car = true;
    }
    pass = pass && passed_car && !log.summary.collision;
  }
  pass = pass && min_d > 0.0 && min_lateral >= 0.5;
  Report(2, pass,
         Format("avoidance: min d_obj %.3f m, min lateral clearance %.3f m "
                "(need 0.5), all seeds past the car, %.1f s",
                min_d, min_lateral, runs.seconds));
}

// Criterion 3.
void CheckFollowing(const ScenarioRuns& runs) {
  const Footprint& car = runs.scenario.obstacles.at(0).footprint;
  bool pass = true;
  double gap_min = 1e9, gap_max = -1e9, v_max = 0.0;
  for (const SimulationLog& log : runs.logs) {
    const VehicleState& end = log.records.back().state;
    const double gap = (car.center.x - 0.5 * car.length) -
                       (end.x + 0.5 * runs.scenario.ego_length);
    gap_min = std::min(gap_min, gap);
    gap_max = std::max(gap_max, gap);
    v_max = std::max(v_max, end.v);
    pass = pass && end.v < 0.3 && gap >= 6.0 && gap <= 16.0 &&
           !log.summary.collision;
  }
  Report(3, pass,
         Format("following: final v <= %.4f m/s, bumper gap in [%.3f, %.3f] m",
                v_max, gap_min, gap_max));
}

// Criteria 4 and 5.
void CheckActuation(const std::vector<ScenarioRuns>& all) {
  const PlannerConfig c;
  bool inputs_ok = true, steer_ok = true;
  double a_lo = 0.0, a_hi = 0.0, w_max = 0.0, steer = 0.0;
  std::size_t count = 0;
  for (const ScenarioRuns& runs : all) {
    for (const SimulationLog& log : runs.logs) {
      for (const TickRecord& r : log.records) {
        ++count;
        a_lo = std::min(a_lo, r.command.a);
        a_hi = std::max(a_hi, r.command.a);
        w_max = std::max(w_max, std::abs(r.command.omega));
        steer = std::max(steer, std::abs(r.state.delta));
        if (!(r.command.a >= c.a_min && r.command.a <= c.a_max &&
              std::abs(r.command.omega) <= c.omega_max)) {
          inputs_ok = false;
        }
        if (!(std::abs(r.state.delta) <= kSteerLimit)) steer_ok = false;
      }
    }
  }
  Report(4, inputs_ok,
         Format("actuation: %zu commands, a in [%.17g, %.17g], max |omega| "
                "%.17g",
                count, a_lo, a_hi, w_max));
  Report(5, steer_ok,
         Format("steering: max |delta| %.3f deg (limit 12)", steer * 180 / kPi));
}

// Criterion 6. Weighted average evaluated directly, without the minimum
// shift, in extended precision.
void CheckUpdateOracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count_m(1, 16), count_t(1, 4);
  std::uniform_real_distribution<double> cost(0.0, 2000.0), noise(-2.0, 2.0),
      lambda(1.0, 500.0), nominal_value(-1.0, 1.0);
  double worst = 0.0, worst_shift = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    PlannerConfig c;
    c.a_min = -1e6;
    c.a_max = 1e6;
    c.omega_max = 1e6;
    c.lambda = lambda(rng);
    RolloutBatch b;
    b.num_rollouts = count_m(rng);
    b.horizon = count_t(rng);
    b.costs.resize(b.num_rollouts);
    b.noise.resize(static_cast<std::size_t>(b.num_rollouts) * b.horizon);
    for (double& s : b.costs) s = cost(rng);
    for (ControlInput& e : b.noise) e = {noise(rng), noise(rng)};
    std::vector<ControlInput> nominal(b.horizon);
    for (ControlInput& u : nominal) u = {nominal_value(rng), nominal_value(rng)};

    const InputSequence u = UpdateInputs(nominal, b, c);
    RolloutBatch shifted = b;
    const double shift = cost(rng);
    for (double& s : shifted.costs) s += shift;
    const InputSequence v = UpdateInputs(nominal, shifted, c);

    for (int t = 0; t < b.horizon; ++t) {
      for (int channel = 0; channel < 2; ++channel) {
        long double num = 0.0L, den = 0.0L, mag = 0.0L;
        for (int m = 0; m < b.num_rollouts; ++m) {
          const long double w =
              std::exp(-static_cast<long double>(b.costs[m]) / c.lambda);
          const ControlInput& e =
              b.noise[static_cast<std::size_t>(m) * b.horizon + t];
          const long double eps = channel == 0 ? e.a : e.omega;
          num += w * eps;
          den += w;
          mag += w * std::abs(eps);
        }
        const double base = channel == 0 ? nominal[t].a : nominal[t].omega;
        const long double direct = base + num / den;
        // Scale: the nominal plus the weighted magnitude of the
        // perturbations, so cancellation in the average does not blow up
        // the relative error.
        const double scale = std::abs(base) + static_cast<double>(mag / den);
        const double got = channel == 0 ? u[t].a : u[t].omega;
        const double again = channel == 0 ? v[t].a : v[t].omega;
        worst = std::max(worst, static_cast<double>(
                                    std::abs(got - direct) / scale));
        worst_shift = std::max(worst_shift, std::abs(again - got) / scale);
      }
    }
  }
  Report(6, worst <= 1e-12 && worst_shift <= 1e-12,
         Format("weighted update vs direct evaluation: max rel err %.3g, "
                "shift invariance %.3g (tol 1e-12)",
                worst, worst_shift));
}

// Criterion 7.
void CheckSmoothing() {
  PlannerConfig c;
  c.a_min = -1e6;
  c.a_max = 1e6;
  c.omega_max = 1e6;
  const auto channel = [](const std::vector<double>& values) {
    InputSequence out;
    for (double v : values) out.push_back({v, -v});
    return out;
  };
  bool constants = true, ramps = true, impulse = true;
  for (double value : {0.0, 0.1, -0.7, 1.0 / 3.0, 123.456}) {
    for (const ControlInput& u : Smooth(channel(std::vector<double>(16, value)), c)) {
      constants = constants && u.a == value && u.omega == -value;
    }
  }
  for (double slope : {1.0, 0.25, -3.5, 0.125}) {
    std::vector<double> ramp;
    for (int t = 0; t < 16; ++t) ramp.push_back(slope * t - 2.0);
    const InputSequence out = Smooth(channel(ramp), c);
    for (int t = 2; t < 14; ++t) {
      ramps = ramps && out[t].a == ramp[t] && out[t].omega == -ramp[t];
    }
  }
  const InputSequence out = Smooth(channel({0, 0, 0, 1, 0, 0, 0}), c);
  const double kernel[] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35,
                           -3.0 / 35};
  for (int k = 0; k < 5; ++k) impulse = impulse && out[k + 1].a == kernel[k];
  impulse = impulse && out[0].a == 0.0 && out[6].a == 0.0;
  Report(7, constants && ramps && impulse,
         Format("smoothing: constants %s, interior ramps %s, impulse %s",
                constants ? "exact" : "WRONG", ramps ? "exact" : "WRONG",
                impulse ? "exact" : "WRONG"));
}

// Criterion 8.
double QuarterTurnError(double dt) {
  const double l = 2.57, delta = 0.2;
  const double radius = l / std::tan(delta);
  const VehicleParams params{l, 0.55, dt};
  VehicleState s{0, 0, 0, 5, delta};
  double worst = 0.0;
  while (s.theta < kPi / 2.0) {
    s = Step(s, {0, 0}, params);
    worst = std::max(worst, std::abs(std::hypot(s.x, s.y - radius) - radius) /
                                radius);
  }
  return worst;
}

void CheckKinematics() {
  const double coarse = QuarterTurnError(0.001);
  const double fine = QuarterTurnError(0.0005);
  Report(8, coarse <= 0.01 && coarse / fine >= 1.9,
         Format("kinematics: circle error %.4g at dt=0.001, %.4g at 0.0005, "
                "ratio %.3f",
                coarse, fine, coarse / fine));
}

// Criterion 9.
void CheckDeterminism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mppi_acceptance";
  fs::create_directories(dir);
  const std::string state = (dir / "state.json").string();
  const std::string scene = (dir / "scene.json").string();
  const std::string config = (dir / "config.json").string();
  std::ofstream(state) << R"({"x": 30, "y": 0.4, "theta": 0.02, "v": 8})";
  std::ofstream(config) << R"({"seed": 7})";
  {
    const Scenario s = BuiltinScenario("object_avoidance");
    nlohmann::json j;
    j["waypoints"] = nlohmann::json::array();
    for (const Waypoint& w : s.path.waypoints()) {
      j["waypoints"].push_back(
          {{"x", w.x}, {"y", w.y}, {"yaw", w.yaw}, {"speed", w.speed}});
    }
    const Footprint& f = s.obstacles[0].footprint;
    j["obstacles"] = {{{"x", f.center.x}, {"y", f.center.y}, {"yaw", f.yaw},
                       {"length", f.length}, {"width", f.width}}};
    j["avoidance_gate"] = s.avoidance_gate;
    std::ofstream(scene) << j.dump();
  }
  std::vector<std::string> outputs;
  bool ok = true;
  for (int workers : {1, 1, 4, 8}) {
    std::ostringstream out, err;
    ok = ok && CmdPlanOnce({state, scene, config, workers}, out, err) == kExitOk;
    outputs.push_back(out.str());
  }
  fs::remove_all(dir);
  bool same = true;
  for (const std::string& o : outputs) same = same && o == outputs[0];
  Report(9, ok && same && !outputs[0].empty(),
         Format("determinism: plan-once output (%zu bytes) %s across two runs "
                "and workers 1/4/8",
                outputs[0].size(), same ? "byte-identical" : "DIFFERS"));
}

// Criterion 10. The limit is stated for hosts with at least 8 hardware
// threads; it is asserted on any host, which is only stricter on smaller ones.
void CheckThroughput() {
  const unsigned threads = std::thread::hardware_concurrency();
  const BenchReport report = RunBench(PlannerConfig{}, 20);
  std::string sweep;
  for (const BenchSample& s : report.sweep) {
    sweep += Format(" M=%d:%.1fms", s.num_rollouts, s.mean_ms);
  }
  const double p95 = report.main.p95_ms;
  Report(10, p95 <= 50.0,
         Format("throughput: p95 %.2f ms at M=2560 T=16 (limit 50) on %u "
                "hardware thread(s)%s; sweep%s",
                p95, threads, threads >= 8 ? "" : ", below the 8-thread class",
                sweep.c_str()));
}

// Criterion 11.
void CheckDecomposition() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-50, 50), yaw(-kPi, kPi),
      len(0.2, 12.0), aspect(0.05, 1.0), unit(-0.5, 0.5);
  long violations = 0, samples = 0;
  for (int rect = 0; rect < 100; ++rect) {
    ObstacleTrack track;
    const double length = len(rng);
    const double width = length * aspect(rng);
    track.footprint = {{pos(rng), pos(rng)}, yaw(rng), length, width};
    const auto circles = Decompose(track, 0.0);
    const double c = std::cos(track.footprint.yaw);
    const double s = std::sin(track.footprint.yaw);
    for (int k = 0; k < 10000; ++k) {
      const double u = unit(rng) * length, v = unit(rng) * width;
      const Vec2 p{track.footprint.center.x + c * u - s * v,
                   track.footprint.center.y + s * u + c * v};
      ++samples;
      bool covered = false;
      for (const CircleObstacle& circle : circles) {
        if (std::hypot(p.x - circle.cx, p.y - circle.cy) <= circle.radius) {
          covered = true;
          break;
        }
      }
      if (!covered) ++violations;
    }
  }
  Report(11, violations == 0,
         Format("decomposition: %ld of %ld interior samples outside the "
                "circle union",
                violations, samples));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  std::vector<ScenarioRuns> all;
  for (const char* name : {"lane_merge", "object_avoidance", "vehicle_following"}) {
    all.push_back(RunSeeds(name));
  }
  CheckSpeedCap(all);
  CheckAvoidance(all[1]);
  CheckFollowing(all[2]);
  CheckActuation(all);
  CheckUpdateOracle();
  CheckSmoothing();
  CheckKinematics();
  CheckDeterminism();
  CheckThroughput();
  CheckDecomposition();
  std::printf("%s: %d failure(s), %.1f s\n", failures ? "FAILED" : "ALL PASSED",
              failures, Seconds(start));
  return failures == 0 ? 0 : 1;
}
