#include "mppi/planner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/random/normal_distribution.hpp>

#include "mppi/parallel.h"

namespace mppi {
namespace {

using CirclesPerStep = std::vector<std::vector<CircleObstacle>>;

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Obstacles at the time of each post-step state x_{t+1}.
CirclesPerStep CirclesOverHorizon(const Scene& scene,
                                  const PlannerConfig& config) {
  CirclesPerStep circles;
  circles.reserve(static_cast<std::size_t>(config.horizon));
  for (int t = 0; t < config.horizon; ++t) {
    circles.push_back(scene.CirclesAt((t + 1) * config.dt));
  }
  return circles;
}

// Acceleration that keeps the next speed at or below v_goal.
double CapAcceleration(double v, double a, const PlannerConfig& config) {
  if (v + a * config.dt > config.v_goal) {
    return std::max(config.a_min, (config.v_goal - v) / config.dt);
  }
  return a;
}

// Cost-to-go of one rollout. The executed command is always clamped to the
// input box and capped at v_goal; `noise` records the cap reduction only when
// config.store_effective_accel_noise is set.
double ScoreRollout(const VehicleState& start,
                    std::span<const ControlInput> nominal,
                    std::span<ControlInput> noise,
                    const CirclesPerStep& circles, const ReferencePath& path,
                    const PlannerConfig& config, const VehicleParams& params,
                    bool input_cost, StateTrajectory* keep) {
  VehicleState x = start;
  if (keep != nullptr) {
    keep->clear();
    keep->reserve(nominal.size() + 1);
    keep->push_back(x);
  }
  double cost = 0.0;
  for (std::size_t t = 0; t < nominal.size(); ++t) {
    const ControlInput& u = nominal[t];
    ControlInput& eps = noise[t];
    ControlInput command =
        ClampInput({u.a + eps.a, u.omega + eps.omega}, config);
    const double capped = CapAcceleration(x.v, command.a, config);
    if (capped != command.a) {
      command.a = capped;
      if (config.store_effective_accel_noise) eps.a = capped - u.a;
    }
    const VehicleState next = Step(x, command, params);
    cost += RunningStateCost(next, x, circles[t], path, config.weights);
    if (input_cost) cost += InputCost(u, eps, config.input_cost);
    x = next;
    if (keep != nullptr) keep->push_back(x);
  }
  return cost + TerminalCost(x, path.target(), config.weights);
}

}  // namespace

void PlannerConfig::Validate() const {
  Require(num_rollouts >= 1, "M must be >= 1");
  Require(horizon >= 1, "T must be >= 1");
  Require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  Require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
  Require(sigma_omega > 0.0 && std::isfinite(sigma_omega),
          "sigma_omega must be positive");
  Require(sigma_a > 0.0 && std::isfinite(sigma_a), "sigma_a must be positive");
  Require(omega_max > 0.0, "omega_max must be positive");
  Require(a_min < 0.0, "a_min must be negative");
  Require(a_max > 0.0, "a_max must be positive");
  Require(v_goal > 0.0 && std::isfinite(v_goal), "v_goal must be positive");
  double sg_sum = 0.0;
  for (double w : sg_weights) sg_sum += w;
  Require(sg_sum != 0.0 && std::isfinite(sg_sum),
          "sg_weights must have a non-zero finite sum");
  Require(inflation_margin >= 0.0, "inflation_margin must be >= 0");
  Require(workers >= 0, "workers must be >= 0");
  weights.Validate();
  input_cost.Validate();
  vehicle().Validate();
}

ControlInput ClampInput(const ControlInput& u, const PlannerConfig& config) {
  return {std::clamp(u.a, config.a_min, config.a_max),
          std::clamp(u.omega, -config.omega_max, config.omega_max)};
}

bool RolloutBatch::AllFinite() const {
  return std::all_of(costs.begin(), costs.end(),
                     [](double c) { return std::isfinite(c); });
}

std::vector<ControlInput> DrawNoise(const PlannerConfig& config,
                                    NoiseEngine& rng) {
  Require(config.sigma_a > 0.0 && std::isfinite(config.sigma_a),
          "sigma_a must be positive");
  Require(config.sigma_omega > 0.0 && std::isfinite(config.sigma_omega),
          "sigma_omega must be positive");
  // Ziggurat sampler; its output does not depend on the standard library.
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ControlInput> noise(static_cast<std::size_t>(config.num_rollouts) *
                                  config.horizon);
  for (ControlInput& eps : noise) {
    eps.a = config.sigma_a * normal(rng);
    eps.omega = config.sigma_omega * normal(rng);
  }
  return noise;
}

void ClampNoise(const PlannerConfig& config,
                std::span<const ControlInput> nominal,
                std::span<ControlInput> noise) {
  const std::size_t horizon = nominal.size();
  for (std::size_t k = 0; k < noise.size(); ++k) {
    const ControlInput& u = nominal[k % horizon];
    const ControlInput clamped =
        ClampInput({u.a + noise[k].a, u.omega + noise[k].omega}, config);
    noise[k] = {clamped.a - u.a, clamped.omega - u.omega};
  }
}

std::vector<ControlInput> SampleNoise(const PlannerConfig& config,
                                      std::span<const ControlInput> nominal,
                                      NoiseEngine& rng) {
  Require(nominal.size() == static_cast<std::size_t>(config.horizon),
          "nominal sequence length must equal T");
  std::vector<ControlInput> noise = DrawNoise(config, rng);
  if (config.store_effective_accel_noise) {
    ClampNoise(config, nominal, noise);
    return noise;
  }
  // Acceleration keeps the raw draw; its bounds bind on the executed command.
  const std::size_t horizon = nominal.size();
  for (std::size_t k = 0; k < noise.size(); ++k) {
    const double omega = nominal[k % horizon].omega;
    noise[k].omega =
        std::clamp(omega + noise[k].omega, -config.omega_max, config.omega_max) -
        omega;
  }
  return noise;
}

RolloutBatch EvaluateRollouts(const VehicleState& state,
                              std::span<const ControlInput> nominal,
                              std::vector<ControlInput> noise,
                              const Scene& scene, const ReferencePath& path,
                              const PlannerConfig& config,
                              bool keep_trajectories) {
  const auto horizon = static_cast<std::size_t>(config.horizon);
  const auto rollouts = static_cast<std::size_t>(config.num_rollouts);
  Require(nominal.size() == horizon, "nominal sequence length must equal T");
  Require(noise.size() == rollouts * horizon, "noise must hold M * T entries");

  RolloutBatch batch;
  batch.num_rollouts = config.num_rollouts;
  batch.horizon = config.horizon;
  batch.noise = std::move(noise);
  batch.costs.assign(rollouts, 0.0);
  if (keep_trajectories) batch.trajectories.resize(rollouts);

  const CirclesPerStep circles = CirclesOverHorizon(scene, config);
  const VehicleParams params = config.vehicle();
  const bool input_cost = !config.input_cost.IsZero();
  ParallelFor(rollouts, ResolveWorkers(config.workers),
              [&](std::size_t begin, std::size_t end) {
                for (std::size_t m = begin; m < end; ++m) {
                  std::span<ControlInput> eps(batch.noise.data() + m * horizon,
                                              horizon);
                  batch.costs[m] = ScoreRollout(
                      state, nominal, eps, circles, path, config, params,
                      input_cost,
                      keep_trajectories ? &batch.trajectories[m] : nullptr);
                }
              });
  return batch;
}

InputSequence UpdateInputs(std::span<const ControlInput> nominal,
                           const RolloutBatch& batch,
                           const PlannerConfig& config) {
  Require(batch.num_rollouts >= 1, "batch needs at least one rollout");
  Require(nominal.size() == static_cast<std::size_t>(batch.horizon),
          "nominal sequence length must equal the batch horizon");
  const double s_min = *std::min_element(batch.costs.begin(), batch.costs.end());

  std::vector<double> weights(batch.costs.size());
  double total = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    weights[m] = std::exp(-(batch.costs[m] - s_min) / config.lambda);
    total += weights[m];
  }

  InputSequence updated(nominal.begin(), nominal.end());
  for (std::size_t t = 0; t < updated.size(); ++t) {
    double sum_a = 0.0;
    double sum_omega = 0.0;
    for (int m = 0; m < batch.num_rollouts; ++m) {
      const ControlInput& eps = batch.Noise(m)[t];
      sum_a += weights[m] * eps.a;
      sum_omega += weights[m] * eps.omega;
    }
    updated[t] = ClampInput(
        {updated[t].a + sum_a / total, updated[t].omega + sum_omega / total},
        config);
  }
  return updated;
}

InputSequence Smooth(std::span<const ControlInput> inputs,
                     const PlannerConfig& config) {
  const auto& w = config.sg_weights;
  const double norm = w[0] + w[1] + w[2] + w[3] + w[4];
  const long n = static_cast<long>(inputs.size());
  const auto at = [&](long i) -> const ControlInput& {
    return inputs[static_cast<std::size_t>(std::clamp(i, 0L, n - 1))];
  };
  const auto filter = [&](double p2, double p1, double c, double n1,
                          double n2) {
    // A flat window passes through untouched.
    if (p2 == c && p1 == c && n1 == c && n2 == c) return c;
    return (w[0] * p2 + w[1] * p1 + w[2] * c + w[3] * n1 + w[4] * n2) / norm;
  };

  InputSequence out(inputs.size());
  for (long t = 0; t < n; ++t) {
    const ControlInput& p2 = at(t - 2);
    const ControlInput& p1 = at(t - 1);
    const ControlInput& c = at(t);
    const ControlInput& n1 = at(t + 1);
    const ControlInput& n2 = at(t + 2);
    out[static_cast<std::size_t>(t)] = ClampInput(
        {filter(p2.a, p1.a, c.a, n1.a, n2.a),
         filter(p2.omega, p1.omega, c.omega, n1.omega, n2.omega)},
        config);
  }
  return out;
}

PlannedTrajectory Reconstruct(const VehicleState& state,
                              std::span<const ControlInput> inputs,
                              const PlannerConfig& config) {
  const VehicleParams params = config.vehicle();
  PlannedTrajectory planned;
  planned.states.reserve(inputs.size() + 1);
  planned.inputs.reserve(inputs.size());
  planned.states.push_back(state);
  for (const ControlInput& raw : inputs) {
    ControlInput u = ClampInput(raw, config);
    u.a = CapAcceleration(planned.states.back().v, u.a, config);
    planned.inputs.push_back(u);
    planned.states.push_back(Step(planned.states.back(), u, params));
  }
  return planned;
}

double SequenceCost(const VehicleState& state,
                    std::span<const ControlInput> inputs, const Scene& scene,
                    const ReferencePath& path, const PlannerConfig& config) {
  PlannerConfig single = config;
  single.horizon = static_cast<int>(inputs.size());
  std::vector<ControlInput> zero(inputs.size());
  return ScoreRollout(state, inputs, zero, CirclesOverHorizon(scene, single),
                      path, single, single.vehicle(),
                      !single.input_cost.IsZero(), nullptr);
}

InputSequence ShiftForWarmStart(std::span<const ControlInput> optimal) {
  InputSequence warm(optimal.begin(), optimal.end());
  if (warm.size() < 2) return warm;
  for (std::size_t t = 0; t + 1 < warm.size(); ++t) warm[t] = optimal[t + 1];
  warm.back() = warm[warm.size() - 2];
  return warm;
}

MppiPlanner::MppiPlanner(PlannerConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  config_.Validate();
}

CycleResult MppiPlanner::PlanCycle(const VehicleState& state,
                                   const Scene& scene,
                                   const ReferencePath& path,
                                   std::span<const ControlInput> warm) {
  const auto started = std::chrono::steady_clock::now();
  Require(warm.size() == static_cast<std::size_t>(config_.horizon),
          "warm-start sequence length must equal T");

  InputSequence nominal;
  nominal.reserve(warm.size());
  for (const ControlInput& u : warm) nominal.push_back(ClampInput(u, config_));

  RolloutBatch batch =
      EvaluateRollouts(state, nominal, SampleNoise(config_, nominal, rng_),
                       scene, path, config_);
  CycleResult result;
  if (!batch.AllFinite()) {
    result.status = CycleStatus::kNonFiniteCost;
    return result;
  }

  const InputSequence smoothed =
      Smooth(UpdateInputs(nominal, batch, config_), config_);
  result.trajectory = Reconstruct(state, smoothed, config_);
  result.trajectory.cycle_cost =
      SequenceCost(state, result.trajectory.inputs, scene, path, config_);
  result.next_warm = ShiftForWarmStart(result.trajectory.inputs);
  result.trajectory.compute_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

}  // namespace mppi
