#include "mppi/cost.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mppi {

void CostWeights::Validate() const {
  for (double w : {dist, target, yaw, speed, safe, terminal}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("cost weights must be finite and >= 0");
    }
  }
  if (!std::isfinite(d_safe_c) || !std::isfinite(d_safe_0)) {
    throw std::invalid_argument("safe distance parameters must be finite");
  }
}

void InputCostParams::Validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be positive");
  }
  if (R[1] != R[2]) throw std::invalid_argument("R must be symmetric");
  const double det = R[0] * R[3] - R[1] * R[2];
  if (R[0] < 0.0 || R[3] < 0.0 || det < 0.0) {
    throw std::invalid_argument("R must be positive semi-definite");
  }
}

double DistanceCost(Vec2 p, const ReferencePath& path) {
  const Waypoint& w = path.Closest(p);
  const double dx = p.x - w.x;
  const double dy = p.y - w.y;
  return dx * dx + dy * dy;
}

double TargetCost(Vec2 p, Vec2 p_prev, Vec2 target) {
  // Squared distances order the same way as distances.
  const double now = (p.x - target.x) * (p.x - target.x) +
                     (p.y - target.y) * (p.y - target.y);
  const double before = (p_prev.x - target.x) * (p_prev.x - target.x) +
                        (p_prev.y - target.y) * (p_prev.y - target.y);
  return now > before ? 1.0 : 0.0;
}

double YawCost(double theta, double theta_ref) {
  const double e = WrapAngle(theta - theta_ref);
  return e * e;
}

double SpeedCost(double v, double v_ref) {
  const double e = v - v_ref;
  return e * e;
}

double SafeDistance(double v, const CostWeights& weights) {
  return weights.d_safe_c * v + weights.d_safe_0;
}

double SafeDistanceCost(Vec2 p, double v,
                        std::span<const CircleObstacle> circles,
                        const CostWeights& weights) {
  if (circles.empty()) return 0.0;
  const double d_obj = MinObstacleDistance(p, circles);
  if (weights.avoidance_gate && d_obj > 0.0) return 0.0;
  const double excess = std::max(SafeDistance(v, weights) - d_obj, 0.0);
  return excess * excess;
}

CostTerms RunningStateCostTerms(const VehicleState& state,
                                const VehicleState& prev,
                                std::span<const CircleObstacle> circles,
                                const ReferencePath& path,
                                const CostWeights& weights) {
  const Vec2 p{state.x, state.y};
  const Waypoint& w = path.Closest(p);
  const double dx = p.x - w.x;
  const double dy = p.y - w.y;

  CostTerms terms;
  terms.dist = dx * dx + dy * dy;
  terms.target = TargetCost(p, {prev.x, prev.y}, path.target());
  terms.yaw = YawCost(state.theta, w.yaw);
  terms.speed = SpeedCost(state.v, w.speed);
  terms.safe = SafeDistanceCost(p, state.v, circles, weights);
  return terms;
}

double RunningStateCost(const VehicleState& state, const VehicleState& prev,
                        std::span<const CircleObstacle> circles,
                        const ReferencePath& path, const CostWeights& weights) {
  return RunningStateCostTerms(state, prev, circles, path, weights)
      .Weighted(weights);
}

double InputCost(const ControlInput& u, const ControlInput& eps,
                 const InputCostParams& params) {
  const auto& R = params.R;
  // R * u and R * eps.
  const double ru_a = R[0] * u.a + R[1] * u.omega;
  const double ru_w = R[2] * u.a + R[3] * u.omega;
  const double re_a = R[0] * eps.a + R[1] * eps.omega;
  const double re_w = R[2] * eps.a + R[3] * eps.omega;
  const double eps_r_u = eps.a * ru_a + eps.omega * ru_w;
  const double u_r_eps = u.a * re_a + u.omega * re_w;
  const double u_r_u = u.a * ru_a + u.omega * ru_w;
  return params.alpha() * eps_r_u + u_r_eps + 0.5 * u_r_u;
}

double TerminalCost(const VehicleState& state, Vec2 target,
                    const CostWeights& weights) {
  const double dx = state.x - target.x;
  const double dy = state.y - target.y;
  return weights.terminal * (dx * dx + dy * dy);
}

}  // namespace mppi
