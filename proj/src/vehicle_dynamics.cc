#include "mppi/vehicle_dynamics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mppi {

void VehicleParams::Validate() const {
  if (!(wheelbase > 0.0)) {
    throw std::invalid_argument("wheelbase must be positive");
  }
  if (!(delta_max > 0.0)) {
    throw std::invalid_argument("delta_max must be positive");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
}

double WrapAngle(double angle) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (angle >= -kPi && angle <= kPi) return angle;
  // One turn off covers every integration step.
  if (angle > kPi && angle <= 3.0 * kPi) return angle - kTwoPi;
  if (angle < -kPi && angle >= -3.0 * kPi) return angle + kTwoPi;
  // std::remainder lands in [-pi, pi] for a 2*pi divisor.
  return std::remainder(angle, kTwoPi);
}

VehicleState Step(const VehicleState& state, const ControlInput& input,
                  const VehicleParams& params) {
  const double dt = params.dt;
  VehicleState next;
  next.x = state.x + state.v * std::cos(state.theta) * dt;
  next.y = state.y + state.v * std::sin(state.theta) * dt;
  next.theta = WrapAngle(state.theta + state.v * std::tan(state.delta) /
                                           params.wheelbase * dt);
  next.v = std::max(0.0, state.v + input.a * dt);
  next.delta = std::clamp(state.delta + input.omega * dt, -params.delta_max,
                          params.delta_max);
  return next;
}

StateTrajectory Rollout(const VehicleState& initial,
                        std::span<const ControlInput> inputs,
                        const VehicleParams& params) {
  StateTrajectory trajectory;
  trajectory.reserve(inputs.size() + 1);
  trajectory.push_back(initial);
  for (const ControlInput& u : inputs) {
    trajectory.push_back(Step(trajectory.back(), u, params));
  }
  return trajectory;
}

}  // namespace mppi
