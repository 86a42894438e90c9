#include "mppi/scene.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace mppi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Cells whose centre lies within this distance of the path get candidate
// lists; the grid extends this far beyond the waypoints' bounding box.
constexpr double kListRadius = 10.0;  // m

bool Finite(double v) { return std::isfinite(v); }

}  // namespace

std::vector<CircleObstacle> Decompose(const ObstacleTrack& track,
                                      double margin) {
  const Footprint& f = track.footprint;
  if (!(f.length > 0.0) || !(f.width > 0.0)) {
    throw std::invalid_argument("obstacle footprint needs positive dimensions");
  }
  if (f.width > f.length) {
    throw std::invalid_argument("obstacle footprint width exceeds length");
  }
  if (!(margin >= 0.0)) {
    throw std::invalid_argument("inflation margin must be non-negative");
  }
  const int count = std::max(1, static_cast<int>(std::ceil(f.length / f.width)));
  const double segment = f.length / count;
  const double radius =
      std::sqrt(0.25 * segment * segment + 0.25 * f.width * f.width) + margin;
  const double ux = std::cos(f.yaw);
  const double uy = std::sin(f.yaw);

  std::vector<CircleObstacle> circles;
  circles.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double offset = -0.5 * f.length + segment * (i + 0.5);
    circles.push_back({f.center.x + offset * ux, f.center.y + offset * uy,
                       radius});
  }
  return circles;
}

ObstacleTrack Advance(const ObstacleTrack& track, double t) {
  ObstacleTrack out = track;
  if (track.kind == ObstacleKind::kMoving) {
    out.footprint.center.x += track.velocity.x * t;
    out.footprint.center.y += track.velocity.y * t;
  }
  return out;
}

std::vector<CircleObstacle> Predict(const ObstacleTrack& track, double t,
                                    double margin) {
  return Decompose(Advance(track, t), margin);
}

double MinObstacleDistance(Vec2 p, std::span<const CircleObstacle> circles) {
  double best = kInf;
  for (const CircleObstacle& c : circles) {
    const double dx = p.x - c.cx;
    const double dy = p.y - c.cy;
    best = std::min(best, std::sqrt(dx * dx + dy * dy) - c.radius);
  }
  return best;
}

ReferencePath::ReferencePath(std::vector<Waypoint> waypoints, Vec2 target)
    : waypoints_(std::move(waypoints)), target_(target) {
  if (waypoints_.size() < 2) {
    throw std::invalid_argument("reference path needs at least two waypoints");
  }
  if (!Finite(target_.x) || !Finite(target_.y)) {
    throw std::invalid_argument("reference path target must be finite");
  }
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const Waypoint& w = waypoints_[i];
    if (!Finite(w.x) || !Finite(w.y) || !Finite(w.yaw) || !Finite(w.speed)) {
      throw std::invalid_argument("reference path waypoint is not finite");
    }
    if (w.speed < 0.0) {
      throw std::invalid_argument("reference path speed must be non-negative");
    }
    if (i > 0 && w.x == waypoints_[i - 1].x && w.y == waypoints_[i - 1].y) {
      throw std::invalid_argument("reference path repeats a waypoint");
    }
  }
  BuildGrid();
}

ReferencePath ReferencePath::FromPolyline(std::span<const Vec2> points,
                                          double speed) {
  if (points.size() < 2) {
    throw std::invalid_argument("reference path needs at least two waypoints");
  }
  std::vector<Waypoint> waypoints;
  waypoints.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2 a = points[i + 1 < points.size() ? i : i - 1];
    const Vec2 b = points[i + 1 < points.size() ? i + 1 : i];
    waypoints.push_back({points[i].x, points[i].y,
                         std::atan2(b.y - a.y, b.x - a.x), speed});
  }
  return ReferencePath(std::move(waypoints), points.back());
}

void ReferencePath::BuildGrid() {
  double min_x = kInf, min_y = kInf, max_x = -kInf, max_y = -kInf;
  double length = 0.0;
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const Waypoint& w = waypoints_[i];
    min_x = std::min(min_x, w.x);
    min_y = std::min(min_y, w.y);
    max_x = std::max(max_x, w.x);
    max_y = std::max(max_y, w.y);
    if (i > 0) {
      length += std::hypot(w.x - waypoints_[i - 1].x, w.y - waypoints_[i - 1].y);
    }
  }
  min_x -= kListRadius;
  min_y -= kListRadius;
  max_x += kListRadius;
  max_y += kListRadius;
  const double n = static_cast<double>(waypoints_.size());
  const double spacing = length / (n - 1.0);
  const double max_cells = std::max(4096.0, 4.0 * n);
  const double area = (max_x - min_x) * (max_y - min_y);
  cell_ = std::max({2.0 * spacing, std::sqrt(area / max_cells),
                    (max_x - min_x) / max_cells, (max_y - min_y) / max_cells});
  origin_x_ = min_x;
  origin_y_ = min_y;
  nx_ = static_cast<long>((max_x - min_x) / cell_) + 1;
  ny_ = static_cast<long>((max_y - min_y) / cell_) + 1;

  const auto cell_of = [this](const Waypoint& w) {
    const long ix = std::clamp(
        static_cast<long>(std::floor((w.x - origin_x_) / cell_)), 0L, nx_ - 1);
    const long iy = std::clamp(
        static_cast<long>(std::floor((w.y - origin_y_) / cell_)), 0L, ny_ - 1);
    return static_cast<std::size_t>(iy * nx_ + ix);
  };
  cell_start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
  for (const Waypoint& w : waypoints_) ++cell_start_[cell_of(w) + 1];
  for (std::size_t c = 1; c < cell_start_.size(); ++c) {
    cell_start_[c] += cell_start_[c - 1];
  }
  cell_items_.resize(waypoints_.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    cell_items_[fill[cell_of(waypoints_[i])]++] = i;
  }
  BuildCandidates();
}

void ReferencePath::BuildCandidates() {
  if (waypoints_.size() > std::numeric_limits<std::uint32_t>::max()) return;
  const double half_diagonal = 0.5 * std::sqrt(2.0) * cell_;
  const double slack = 1e-9 * cell_;
  const std::size_t cells = static_cast<std::size_t>(nx_ * ny_);
  cand_start_.assign(cells + 1, 0);
  cand_items_.clear();
  std::vector<std::uint32_t> list;
  for (long iy = 0; iy < ny_; ++iy) {
    for (long ix = 0; ix < nx_; ++ix) {
      const std::size_t c = static_cast<std::size_t>(iy * nx_ + ix);
      cand_start_[c] = static_cast<std::uint32_t>(cand_items_.size());
      const double lo_x = origin_x_ + ix * cell_;
      const double lo_y = origin_y_ + iy * cell_;
      const Vec2 center{lo_x + 0.5 * cell_, lo_y + 0.5 * cell_};
      const Waypoint& nearest = waypoints_[SearchBuckets(center)];
      const double center_d =
          std::hypot(center.x - nearest.x, center.y - nearest.y);
      if (center_d > kListRadius) continue;
      // Every point of the cell has a waypoint within `bound`, so only
      // waypoints that close to the cell can be nearest.
      const double bound = center_d + half_diagonal + slack;
      const long reach = static_cast<long>(std::ceil(bound / cell_));
      list.clear();
      for (long cy = iy - reach; cy <= iy + reach; ++cy) {
        for (long cx = ix - reach; cx <= ix + reach; ++cx) {
          std::size_t begin = 0, end = 0;
          if (!CellRange(cx, cy, begin, end)) continue;
          for (std::size_t k = begin; k < end; ++k) {
            const Waypoint& w = waypoints_[cell_items_[k]];
            const double dx = std::max({0.0, lo_x - w.x, w.x - (lo_x + cell_)});
            const double dy = std::max({0.0, lo_y - w.y, w.y - (lo_y + cell_)});
            if (dx * dx + dy * dy <= bound * bound) {
              list.push_back(static_cast<std::uint32_t>(cell_items_[k]));
            }
          }
        }
      }
      std::sort(list.begin(), list.end());
      cand_items_.insert(cand_items_.end(), list.begin(), list.end());
    }
  }
  cand_start_[cells] = static_cast<std::uint32_t>(cand_items_.size());
}

bool ReferencePath::CellRange(long ix, long iy, std::size_t& begin,
                              std::size_t& end) const {
  if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return false;
  const auto c = static_cast<std::size_t>(iy * nx_ + ix);
  begin = cell_start_[c];
  end = cell_start_[c + 1];
  return true;
}

std::size_t ReferencePath::ClosestIndex(Vec2 p) const {
  if (!cand_start_.empty()) {
    const double fx = std::floor((p.x - origin_x_) / cell_);
    const double fy = std::floor((p.y - origin_y_) / cell_);
    if (fx >= 0.0 && fy >= 0.0 && fx < static_cast<double>(nx_) &&
        fy < static_cast<double>(ny_)) {
      const auto c = static_cast<std::size_t>(static_cast<long>(fy) * nx_ +
                                              static_cast<long>(fx));
      const std::uint32_t begin = cand_start_[c];
      const std::uint32_t end = cand_start_[c + 1];
      if (begin != end) {
        // Candidates are ascending, so a strict comparison keeps the
        // lowest index among ties.
        double best_d2 = kInf;
        std::size_t best = 0;
        for (std::uint32_t k = begin; k < end; ++k) {
          const Waypoint& w = waypoints_[cand_items_[k]];
          const double dx = p.x - w.x;
          const double dy = p.y - w.y;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d2) {
            best_d2 = d2;
            best = cand_items_[k];
          }
        }
        return best;
      }
    }
  }
  return SearchBuckets(p);
}

std::size_t ReferencePath::SearchBuckets(Vec2 p) const {
  double best_d2 = kInf;
  std::size_t best = 0;
  const auto consider = [&](std::size_t i) {
    const double dx = p.x - waypoints_[i].x;
    const double dy = p.y - waypoints_[i].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
      best_d2 = d2;
      best = i;
    }
  };

  const double local_x = p.x - origin_x_;
  const double local_y = p.y - origin_y_;
  const double fx = std::floor(local_x / cell_);
  const double fy = std::floor(local_y / cell_);
  constexpr double kMaxCell = 1e9;
  if (!(std::abs(fx) < kMaxCell) || !(std::abs(fy) < kMaxCell)) {
    for (std::size_t i = 0; i < waypoints_.size(); ++i) consider(i);
    return best;
  }
  const long ix = static_cast<long>(fx);
  const long iy = static_cast<long>(fy);
  const long gap_x = std::max({0L, -ix, ix - (nx_ - 1)});
  const long gap_y = std::max({0L, -iy, iy - (ny_ - 1)});
  const long first_ring = std::max(gap_x, gap_y);
  const long last_ring = std::max({std::abs(ix), std::abs(ix - (nx_ - 1)),
                                   std::abs(iy), std::abs(iy - (ny_ - 1))});

  const auto scan = [&](long cx, long cy) {
    std::size_t begin = 0, end = 0;
    if (!CellRange(cx, cy, begin, end)) return;
    for (std::size_t k = begin; k < end; ++k) consider(cell_items_[k]);
  };
  for (long r = first_ring; r <= last_ring; ++r) {
    if (r == 0) {
      scan(ix, iy);
    } else {
      for (long cx = ix - r; cx <= ix + r; ++cx) {
        scan(cx, iy - r);
        scan(cx, iy + r);
      }
      for (long cy = iy - r + 1; cy <= iy + r - 1; ++cy) {
        scan(ix - r, cy);
        scan(ix + r, cy);
      }
    }
    // Every unvisited cell lies outside the (2r + 1)^2 block around p's
    // cell, so its points are at least as far as that block's boundary.
    const double lo_x = (ix - r) * cell_;
    const double hi_x = (ix + r + 1) * cell_;
    const double lo_y = (iy - r) * cell_;
    const double hi_y = (iy + r + 1) * cell_;
    const double bound = std::min({local_x - lo_x, hi_x - local_x,
                                   local_y - lo_y, hi_y - local_y}) -
                         1e-9 * cell_;
    if (bound > 0.0 && best_d2 < bound * bound) break;
  }
  return best;
}

std::vector<CircleObstacle> Scene::CirclesAt(double t) const {
  std::vector<CircleObstacle> circles;
  for (const ObstacleTrack& track : tracks) {
    const auto c = Predict(track, t, inflation_margin);
    circles.insert(circles.end(), c.begin(), c.end());
  }
  return circles;
}

}  // namespace mppi
