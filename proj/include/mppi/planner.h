#ifndef MPPI_PLANNER_H_
#define MPPI_PLANNER_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

#include "mppi/cost.h"
#include "mppi/scene.h"
#include "mppi/vehicle_dynamics.h"

namespace mppi {

inline constexpr double kKmhToMps = 1.0 / 3.6;

// Same sequence as std::mt19937_64, generated faster.
using NoiseEngine = boost::random::mt19937_64;

// Sampling, constraint and cost parameters of one planner. Defaults are the
// experimental values of the reference implementation.
struct PlannerConfig {
  int num_rollouts = 2560;  // M
  int horizon = 16;         // T
  double dt = 0.25;         // s
  double lambda = 150.0;
  double sigma_omega = 0.05;  // rad/s, standard deviation
  double sigma_a = 0.85;      // m/s^2, standard deviation
  double omega_max = 0.11;    // rad/s
  double a_max = 1.1;         // m/s^2
  double a_min = -2.5;        // m/s^2
  double v_goal = 30.0 * kKmhToMps;
  std::uint64_t seed = 0;
  // Savitzky-Golay weights, normalised by their sum when applied.
  std::array<double, 5> sg_weights{-3.0, 12.0, 17.0, 12.0, -3.0};

  CostWeights weights;
  InputCostParams input_cost;
  double wheelbase = 2.57;        // m
  double delta_max = 0.55;        // rad
  double inflation_margin = 0.0;  // m, added to every obstacle circle
  int workers = 0;                // 0: one per hardware thread
  // When set, the stored acceleration perturbation is the executed one
  // (after the input box and the v_goal cap). By default it is the raw draw
  // and only the steering-rate perturbation is stored box-clamped; clamping
  // a perturbation whose nominal sits near a_max truncates one side of the
  // Gaussian and biases the weighted average toward braking.
  bool store_effective_accel_noise = false;

  VehicleParams vehicle() const { return {wheelbase, delta_max, dt}; }

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

// Clamps a command into the acceleration / steering-rate box.
ControlInput ClampInput(const ControlInput& u, const PlannerConfig& config);

struct RolloutBatch {
  int num_rollouts = 0;
  int horizon = 0;
  // Effective perturbations, rollout-major: noise[m * horizon + t].
  std::vector<ControlInput> noise;
  std::vector<double> costs;
  // Filled only when requested.
  std::vector<StateTrajectory> trajectories;

  std::span<const ControlInput> Noise(int m) const {
    return {noise.data() + static_cast<std::size_t>(m) * horizon,
            static_cast<std::size_t>(horizon)};
  }
  bool AllFinite() const;
};

struct PlannedTrajectory {
  StateTrajectory states;  // horizon + 1
  InputSequence inputs;    // horizon
  double cycle_cost = 0.0;
  double compute_ms = 0.0;
};

// Raw N(0, diag(sigma_a^2, sigma_omega^2)) draws, M * T of them,
// rollout-major. Throws std::invalid_argument on a non-positive sigma.
std::vector<ControlInput> DrawNoise(const PlannerConfig& config,
                                    NoiseEngine& rng);

// Rewrites every perturbation so that nominal + eps lies inside the input
// box.
void ClampNoise(const PlannerConfig& config,
                std::span<const ControlInput> nominal,
                std::span<ControlInput> noise);

// DrawNoise followed by clamping. The steering-rate channel is always stored
// as nominal + eps clamped to the box minus nominal; the acceleration channel
// only when config.store_effective_accel_noise is set.
std::vector<ControlInput> SampleNoise(const PlannerConfig& config,
                                      std::span<const ControlInput> nominal,
                                      NoiseEngine& rng);

// Simulates and scores every rollout. Each executed command is clamped to
// the input box, and where a step would push the speed above v_goal its
// acceleration is reduced so the speed lands on v_goal (stored back into the
// noise only with config.store_effective_accel_noise). Results are
// independent of config.workers.
RolloutBatch EvaluateRollouts(const VehicleState& state,
                              std::span<const ControlInput> nominal,
                              std::vector<ControlInput> noise,
                              const Scene& scene, const ReferencePath& path,
                              const PlannerConfig& config,
                              bool keep_trajectories = false);

// Exponentially weighted perturbation average, one weight per rollout from
// its whole cost-to-go, shifted by the batch minimum. Output is clamped.
InputSequence UpdateInputs(std::span<const ControlInput> nominal,
                           const RolloutBatch& batch,
                           const PlannerConfig& config);

// Five-point Savitzky-Golay filter per channel with the sequence padded by
// repeating each end twice. Output is clamped.
InputSequence Smooth(std::span<const ControlInput> inputs,
                     const PlannerConfig& config);

// Re-simulates `inputs` from `state` with the same speed cap the rollouts
// use. The returned inputs carry any cap adjustment, so
// states[t + 1] == Step(states[t], inputs[t]) holds exactly.
PlannedTrajectory Reconstruct(const VehicleState& state,
                              std::span<const ControlInput> inputs,
                              const PlannerConfig& config);

// Cost-to-go of a single unperturbed input sequence.
double SequenceCost(const VehicleState& state,
                    std::span<const ControlInput> inputs, const Scene& scene,
                    const ReferencePath& path, const PlannerConfig& config);

// u_t <- u*_{t+1}; the last slot repeats the new second-to-last one.
InputSequence ShiftForWarmStart(std::span<const ControlInput> optimal);

enum class CycleStatus { kOk, kNonFiniteCost };

struct CycleResult {
  CycleStatus status = CycleStatus::kOk;
  PlannedTrajectory trajectory;
  InputSequence next_warm;
};

// One planner instance; not safe for concurrent PlanCycle calls. The noise
// stream is seeded once from config.seed and advances every cycle.
class MppiPlanner {
 public:
  explicit MppiPlanner(PlannerConfig config);

  CycleResult PlanCycle(const VehicleState& state, const Scene& scene,
                        const ReferencePath& path,
                        std::span<const ControlInput> warm);

  const PlannerConfig& config() const { return config_; }
  InputSequence ZeroSequence() const {
    return InputSequence(static_cast<std::size_t>(config_.horizon));
  }

 private:
  PlannerConfig config_;
  NoiseEngine rng_;
};

}  // namespace mppi

#endif  // MPPI_PLANNER_H_
