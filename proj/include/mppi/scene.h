#ifndef MPPI_SCENE_H_
#define MPPI_SCENE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mppi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct CircleObstacle {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 1.0;

  friend bool operator==(const CircleObstacle&, const CircleObstacle&) =
      default;
};

// Oriented rectangle. `length` runs along `yaw`.
struct Footprint {
  Vec2 center;
  double yaw = 0.0;
  double length = 4.5;
  double width = 1.8;
};

enum class ObstacleKind { kStatic, kMoving };

struct ObstacleTrack {
  Footprint footprint;
  Vec2 velocity;  // m/s, ignored for static tracks
  ObstacleKind kind = ObstacleKind::kStatic;
};

// Covers the footprint with max(1, ceil(length / width)) equal circles whose
// centers split the major axis into equal segments. Each radius is the
// half-diagonal of one segment plus `margin`.
// Throws std::invalid_argument for non-positive dimensions, width > length,
// or a negative margin.
std::vector<CircleObstacle> Decompose(const ObstacleTrack& track,
                                      double margin);

// Constant-velocity extrapolation of the track `t` seconds ahead. Static
// tracks are returned unchanged.
ObstacleTrack Advance(const ObstacleTrack& track, double t);

// Circle decomposition of the track predicted `t` seconds ahead.
std::vector<CircleObstacle> Predict(const ObstacleTrack& track, double t,
                                    double margin = 0.0);

// Minimum over circles of (center distance - radius). Negative inside a
// circle; +infinity for an empty list.
double MinObstacleDistance(Vec2 p, std::span<const CircleObstacle> circles);

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;    // rad
  double speed = 0.0;  // m/s
};

// Waypoint polyline with a target point. Nearest-waypoint queries are exact
// (ties resolve to the lowest index). Grid cells near the path hold the short
// list of waypoints that can be nearest to any point inside them; elsewhere a
// ring search over the bucketed waypoints is used.
class ReferencePath {
 public:
  // Throws std::invalid_argument for fewer than two waypoints, repeated
  // consecutive waypoints, negative speeds or non-finite values.
  ReferencePath(std::vector<Waypoint> waypoints, Vec2 target);

  // Builds waypoints from a polyline, taking each yaw from the direction of
  // the outgoing segment (the last point reuses the incoming one). The
  // target is the final point.
  static ReferencePath FromPolyline(std::span<const Vec2> points,
                                    double speed);

  std::size_t ClosestIndex(Vec2 p) const;
  const Waypoint& Closest(Vec2 p) const { return waypoints_[ClosestIndex(p)]; }

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  Vec2 target() const { return target_; }

 private:
  void BuildGrid();
  void BuildCandidates();
  bool CellRange(long ix, long iy, std::size_t& begin, std::size_t& end) const;
  std::size_t SearchBuckets(Vec2 p) const;

  std::vector<Waypoint> waypoints_;
  Vec2 target_;

  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  double cell_ = 1.0;
  long nx_ = 1;
  long ny_ = 1;
  std::vector<std::size_t> cell_start_;  // CSR offsets, nx_ * ny_ + 1
  std::vector<std::size_t> cell_items_;  // waypoint indices, ascending per cell
  // Per-cell nearest candidates, CSR; an empty cell falls back to buckets.
  std::vector<std::uint32_t> cand_start_;
  std::vector<std::uint32_t> cand_items_;
};

// Obstacle tracks as seen at the start of a planning cycle.
struct Scene {
  std::vector<ObstacleTrack> tracks;
  double inflation_margin = 0.0;  // m

  // All circles of all tracks predicted `t` seconds ahead.
  std::vector<CircleObstacle> CirclesAt(double t) const;
};

}  // namespace mppi

#endif  // MPPI_SCENE_H_
