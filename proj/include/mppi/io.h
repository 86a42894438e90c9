#ifndef MPPI_IO_H_
#define MPPI_IO_H_

#include <stdexcept>
#include <string>

#include "mppi/planner.h"
#include "mppi/simulator.h"
#include "mppi/vehicle_dynamics.h"

namespace mppi {

// Malformed or unreadable input; the message names the offending key or file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Planner config from a JSON object. Every key is optional and defaults to
// the PlannerConfig default; unknown keys are rejected. Speeds (v_goal) are
// in km/h, everything else in SI.
PlannerConfig ParseConfig(const std::string& json_text);
PlannerConfig LoadConfig(const std::string& file);

// Scenario from a JSON object in SI units. The path is either "waypoints"
// (objects with x, y, yaw, speed) or "polyline" ([x, y] pairs) with
// "path_speed". "target" defaults to the last waypoint. The same format
// serves as the scene file of a single planning cycle, where only the path
// and obstacles are required.
Scenario ParseScenario(const std::string& json_text);
Scenario LoadScenario(const std::string& file);

// Built-in scenario name or a scenario file.
Scenario ResolveScenario(const std::string& name_or_file);

// {"x", "y", "theta", "v", "delta"}; missing keys are zero.
VehicleState ParseState(const std::string& json_text);
VehicleState LoadState(const std::string& file);

std::string ReadFile(const std::string& file);

}  // namespace mppi

#endif  // MPPI_IO_H_
