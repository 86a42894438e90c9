#ifndef MPPI_VEHICLE_DYNAMICS_H_
#define MPPI_VEHICLE_DYNAMICS_H_

#include <span>
#include <vector>

namespace mppi {

// Kinematic bicycle state. The reference point is the rear axle.
struct VehicleState {
  double x = 0.0;      // m, east
  double y = 0.0;      // m, north
  double theta = 0.0;  // rad, wrapped to [-pi, pi]
  double v = 0.0;      // m/s, >= 0
  double delta = 0.0;  // rad, front wheel steering angle

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ControlInput {
  double a = 0.0;      // m/s^2
  double omega = 0.0;  // rad/s, steering rate

  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct VehicleParams {
  double wheelbase = 2.57;  // m
  double delta_max = 0.55;  // rad
  double dt = 0.25;         // s

  // Throws std::invalid_argument on a non-positive wheelbase, steering bound
  // or time step.
  void Validate() const;
};

using InputSequence = std::vector<ControlInput>;
using StateTrajectory = std::vector<VehicleState>;

// Maps an angle onto [-pi, pi].
double WrapAngle(double angle);

// One explicit Euler step of the bicycle model. The right-hand side uses the
// pre-step speed, yaw and steering angle. Speed is clamped at zero and the
// steering angle at +/- delta_max. The input is expected to be clamped by
// the caller.
VehicleState Step(const VehicleState& state, const ControlInput& input,
                  const VehicleParams& params);

// Returns inputs.size() + 1 states starting with `initial`.
StateTrajectory Rollout(const VehicleState& initial,
                        std::span<const ControlInput> inputs,
                        const VehicleParams& params);

}  // namespace mppi

#endif  // MPPI_VEHICLE_DYNAMICS_H_
