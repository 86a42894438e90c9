#include "mppi/io.h"

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mppi {
namespace {

using nlohmann::json;

json ParseJson(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": invalid JSON: " + e.what());
  }
}

void RequireObject(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected a JSON object");
}

double Number(const json& j, const std::string& key) {
  if (!j.is_number()) throw InputError("key '" + key + "': expected a number");
  return j.get<double>();
}

bool Boolean(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw InputError("key '" + key + "': expected true/false");
  return j.get<bool>();
}

long long Integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) {
    throw InputError("key '" + key + "': expected an integer");
  }
  return j.get<long long>();
}

template <std::size_t N>
std::array<double, N> NumberArray(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != N) {
    throw InputError("key '" + key + "': expected an array of " +
                     std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = Number(j[i], key + "[" + std::to_string(i) + "]");
  }
  return out;
}

// Dispatches each key of `obj` to its handler; unknown keys are errors.
using Handlers = std::map<std::string, std::function<void(const json&)>>;

void Visit(const json& obj, const std::string& prefix,
           const Handlers& handlers) {
  RequireObject(obj, prefix.empty() ? "document" : prefix);
  for (const auto& [key, value] : obj.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      throw InputError("unknown key '" + prefix + key + "'");
    }
    it->second(value);
  }
}

// Wraps validation failures of a finished object so they surface as input
// errors.
template <typename Fn>
void Validated(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

VehicleState StateFromJson(const json& j, const std::string& prefix) {
  VehicleState s;
  Visit(j, prefix,
        {{"x", [&](const json& v) { s.x = Number(v, prefix + "x"); }},
         {"y", [&](const json& v) { s.y = Number(v, prefix + "y"); }},
         {"theta",
          [&](const json& v) { s.theta = Number(v, prefix + "theta"); }},
         {"v", [&](const json& v) { s.v = Number(v, prefix + "v"); }},
         {"delta",
          [&](const json& v) { s.delta = Number(v, prefix + "delta"); }}});
  return s;
}

Vec2 PointFromJson(const json& j, const std::string& key) {
  const auto p = NumberArray<2>(j, key);
  return {p[0], p[1]};
}

ObstacleTrack ObstacleFromJson(const json& j, const std::string& prefix) {
  ObstacleTrack track;
  Footprint& f = track.footprint;
  Visit(j, prefix,
        {{"x", [&](const json& v) { f.center.x = Number(v, prefix + "x"); }},
         {"y", [&](const json& v) { f.center.y = Number(v, prefix + "y"); }},
         {"yaw", [&](const json& v) { f.yaw = Number(v, prefix + "yaw"); }},
         {"length",
          [&](const json& v) { f.length = Number(v, prefix + "length"); }},
         {"width",
          [&](const json& v) { f.width = Number(v, prefix + "width"); }},
         {"vx",
          [&](const json& v) { track.velocity.x = Number(v, prefix + "vx"); }},
         {"vy",
          [&](const json& v) { track.velocity.y = Number(v, prefix + "vy"); }},
         {"moving", [&](const json& v) {
            track.kind = Boolean(v, prefix + "moving") ? ObstacleKind::kMoving
                                                       : ObstacleKind::kStatic;
          }}});
  return track;
}

}  // namespace

std::string ReadFile(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read '" + file + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

PlannerConfig ParseConfig(const std::string& json_text) {
  const json doc = ParseJson(json_text, "config");
  PlannerConfig c;
  CostWeights& w = c.weights;
  const auto num = [](double& field, const char* key) {
    return [&field, key](const json& v) { field = Number(v, key); };
  };
  Visit(doc, "",
        {{"M",
          [&](const json& v) { c.num_rollouts = static_cast<int>(Integer(v, "M")); }},
         {"T", [&](const json& v) { c.horizon = static_cast<int>(Integer(v, "T")); }},
         {"dt", num(c.dt, "dt")},
         {"lambda", num(c.lambda, "lambda")},
         {"sigma_omega", num(c.sigma_omega, "sigma_omega")},
         {"sigma_a", num(c.sigma_a, "sigma_a")},
         {"omega_max", num(c.omega_max, "omega_max")},
         {"a_max", num(c.a_max, "a_max")},
         {"a_min", num(c.a_min, "a_min")},
         {"v_goal",
          [&](const json& v) { c.v_goal = Number(v, "v_goal") * kKmhToMps; }},
         {"seed",
          [&](const json& v) {
            const long long seed = Integer(v, "seed");
            if (seed < 0) throw InputError("key 'seed': must be non-negative");
            c.seed = static_cast<std::uint64_t>(seed);
          }},
         {"sg_weights",
          [&](const json& v) { c.sg_weights = NumberArray<5>(v, "sg_weights"); }},
         {"w_dist", num(w.dist, "w_dist")},
         {"w_target", num(w.target, "w_target")},
         {"w_yaw", num(w.yaw, "w_yaw")},
         {"w_speed", num(w.speed, "w_speed")},
         {"w_safe", num(w.safe, "w_safe")},
         {"w_terminal", num(w.terminal, "w_terminal")},
         {"d_safe_c", num(w.d_safe_c, "d_safe_c")},
         {"d_safe_0", num(w.d_safe_0, "d_safe_0")},
         {"R", [&](const json& v) { c.input_cost.R = NumberArray<4>(v, "R"); }},
         {"gamma", num(c.input_cost.gamma, "gamma")},
         {"wheelbase", num(c.wheelbase, "wheelbase")},
         {"delta_max", num(c.delta_max, "delta_max")},
         {"inflation_margin", num(c.inflation_margin, "inflation_margin")},
         {"workers",
          [&](const json& v) { c.workers = static_cast<int>(Integer(v, "workers")); }},
         {"store_effective_accel_noise", [&](const json& v) {
            c.store_effective_accel_noise =
                Boolean(v, "store_effective_accel_noise");
          }}});
  Validated([&] { c.Validate(); });
  return c;
}

PlannerConfig LoadConfig(const std::string& file) {
  const std::string text = ReadFile(file);
  try {
    return ParseConfig(text);
  } catch (const InputError& e) {
    throw InputError(file + ": " + e.what());
  }
}

Scenario ParseScenario(const std::string& json_text) {
  const json doc = ParseJson(json_text, "scenario");
  std::string name = "custom";
  std::optional<std::vector<Waypoint>> waypoints;
  std::optional<std::vector<Vec2>> polyline;
  std::optional<double> path_speed;
  std::optional<Vec2> target;
  std::vector<ObstacleTrack> obstacles;
  VehicleState initial;
  double duration = 20.0;
  bool gate = false;
  double ego_length = 4.5;
  double ego_width = 1.8;

  Visit(
      doc, "",
      {{"name",
        [&](const json& v) {
          if (!v.is_string()) throw InputError("key 'name': expected a string");
          name = v.get<std::string>();
        }},
       {"waypoints",
        [&](const json& v) {
          if (!v.is_array()) {
            throw InputError("key 'waypoints': expected an array");
          }
          waypoints.emplace();
          for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string p = "waypoints[" + std::to_string(i) + "].";
            Waypoint w;
            Visit(v[i], p,
                  {{"x", [&](const json& e) { w.x = Number(e, p + "x"); }},
                   {"y", [&](const json& e) { w.y = Number(e, p + "y"); }},
                   {"yaw", [&](const json& e) { w.yaw = Number(e, p + "yaw"); }},
                   {"speed",
                    [&](const json& e) { w.speed = Number(e, p + "speed"); }}});
            waypoints->push_back(w);
          }
        }},
       {"polyline",
        [&](const json& v) {
          if (!v.is_array()) throw InputError("key 'polyline': expected an array");
          polyline.emplace();
          for (std::size_t i = 0; i < v.size(); ++i) {
            polyline->push_back(
                PointFromJson(v[i], "polyline[" + std::to_string(i) + "]"));
          }
        }},
       {"path_speed",
        [&](const json& v) { path_speed = Number(v, "path_speed"); }},
       {"target", [&](const json& v) { target = PointFromJson(v, "target"); }},
       {"obstacles",
        [&](const json& v) {
          if (!v.is_array()) {
            throw InputError("key 'obstacles': expected an array");
          }
          for (std::size_t i = 0; i < v.size(); ++i) {
            obstacles.push_back(ObstacleFromJson(
                v[i], "obstacles[" + std::to_string(i) + "]."));
          }
        }},
       {"initial_state",
        [&](const json& v) { initial = StateFromJson(v, "initial_state."); }},
       {"duration", [&](const json& v) { duration = Number(v, "duration"); }},
       {"avoidance_gate",
        [&](const json& v) { gate = Boolean(v, "avoidance_gate"); }},
       {"ego_length",
        [&](const json& v) { ego_length = Number(v, "ego_length"); }},
       {"ego_width", [&](const json& v) { ego_width = Number(v, "ego_width"); }}});

  if (waypoints.has_value() == polyline.has_value()) {
    throw InputError("scenario needs exactly one of 'waypoints' or 'polyline'");
  }
  if (polyline && !path_speed) {
    throw InputError("key 'path_speed' is required with 'polyline'");
  }
  if (waypoints && path_speed) {
    throw InputError("key 'path_speed' only applies to 'polyline'");
  }

  std::optional<Scenario> scenario;
  Validated([&] {
    ReferencePath path =
        polyline ? ReferencePath::FromPolyline(*polyline, *path_speed)
                 : ReferencePath(*waypoints,
                                 waypoints->empty()
                                     ? Vec2{}
                                     : Vec2{waypoints->back().x,
                                            waypoints->back().y});
    if (target) path = ReferencePath(path.waypoints(), *target);
    for (const ObstacleTrack& track : obstacles) Decompose(track, 0.0);
    scenario.emplace(Scenario{.name = name,
                              .path = std::move(path),
                              .obstacles = obstacles,
                              .initial_state = initial,
                              .duration = duration,
                              .avoidance_gate = gate,
                              .ego_length = ego_length,
                              .ego_width = ego_width});
    scenario->Validate();
  });
  return std::move(*scenario);
}

Scenario LoadScenario(const std::string& file) {
  const std::string text = ReadFile(file);
  try {
    return ParseScenario(text);
  } catch (const InputError& e) {
    throw InputError(file + ": " + e.what());
  }
}

Scenario ResolveScenario(const std::string& name_or_file) {
  for (const std::string& name : BuiltinScenarioNames()) {
    if (name == name_or_file) return BuiltinScenario(name);
  }
  return LoadScenario(name_or_file);
}

VehicleState ParseState(const std::string& json_text) {
  return StateFromJson(ParseJson(json_text, "state"), "");
}

VehicleState LoadState(const std::string& file) {
  const std::string text = ReadFile(file);
  try {
    return ParseState(text);
  } catch (const InputError& e) {
    throw InputError(file + ": " + e.what());
  }
}

}  // namespace mppi
