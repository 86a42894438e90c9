#ifndef MPPI_COST_H_
#define MPPI_COST_H_

#include <array>
#include <span>

#include "mppi/scene.h"
#include "mppi/vehicle_dynamics.h"

namespace mppi {

struct CostWeights {
  double dist = 15.0;
  double target = 7.0;
  double yaw = 120.0;
  double speed = 5.0;
  double safe = 25.0;
  double terminal = 0.0;
  double d_safe_c = 1.36;  // s
  double d_safe_0 = 11.0;  // m
  // Object-avoidance mode: the safe-distance term only fires on contact.
  bool avoidance_gate = false;

  void Validate() const;
};

// Quadratic input cost q_u(u, eps) = alpha eps'Ru + u'R eps + 0.5 u'Ru with
// alpha = (gamma - 1) / (2 gamma). R is row-major over (a, omega).
struct InputCostParams {
  std::array<double, 4> R{0.0, 0.0, 0.0, 0.0};
  double gamma = 1.0;

  double alpha() const { return (gamma - 1.0) / (2.0 * gamma); }
  bool IsZero() const { return R == std::array<double, 4>{}; }

  // Rejects non-positive gamma, asymmetric R and R that is not PSD.
  void Validate() const;
};

// ||p - W||^2 with W the closest waypoint.
double DistanceCost(Vec2 p, const ReferencePath& path);

// 1 when p moved away from the target relative to p_prev, else 0.
double TargetCost(Vec2 p, Vec2 p_prev, Vec2 target);

double YawCost(double theta, double theta_ref);

double SpeedCost(double v, double v_ref);

// Desired clearance d_safe = d_safe_c * v + d_safe_0.
double SafeDistance(double v, const CostWeights& weights);

// max(d_safe - d_obj, 0)^2 with d_obj the clearance to the nearest circle.
// With the avoidance gate set, zero unless d_obj <= 0.
double SafeDistanceCost(Vec2 p, double v,
                        std::span<const CircleObstacle> circles,
                        const CostWeights& weights);

// Unweighted scenario terms at one horizon step.
struct CostTerms {
  double dist = 0.0;
  double target = 0.0;
  double yaw = 0.0;
  double speed = 0.0;
  double safe = 0.0;

  double Weighted(const CostWeights& w) const {
    return w.dist * dist + w.target * target + w.yaw * yaw + w.speed * speed +
           w.safe * safe;
  }
};

// `circles` are the obstacles predicted at the time of `state`; `prev` is
// the state one step earlier in the same rollout.
CostTerms RunningStateCostTerms(const VehicleState& state,
                                const VehicleState& prev,
                                std::span<const CircleObstacle> circles,
                                const ReferencePath& path,
                                const CostWeights& weights);

double RunningStateCost(const VehicleState& state, const VehicleState& prev,
                        std::span<const CircleObstacle> circles,
                        const ReferencePath& path, const CostWeights& weights);

double InputCost(const ControlInput& u, const ControlInput& eps,
                 const InputCostParams& params);

// weights.terminal * ||(x, y) - target||^2
double TerminalCost(const VehicleState& state, Vec2 target,
                    const CostWeights& weights);

}  // namespace mppi

#endif  // MPPI_COST_H_
