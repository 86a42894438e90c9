#ifndef MPPI_REPORT_H_
#define MPPI_REPORT_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "mppi/planner.h"
#include "mppi/simulator.h"

namespace mppi {

// One parsed row of a trajectory CSV.
struct TrajectoryRow {
  double t = 0.0;
  VehicleState state;
  ControlInput command;
  double d_obj = 0.0;
  double cycle_ms = 0.0;
};

inline constexpr const char* kTrajectoryHeader =
    "t_s,x_m,y_m,theta_rad,v_mps,delta_rad,a_cmd,omega_cmd,d_obj_m,cycle_ms";

// Values are written with 17 significant digits; an obstacle-free d_obj is
// written as "inf".
void WriteTrajectoryCsv(std::ostream& out, const SimulationLog& log);

// Throws InputError on a wrong header or a malformed row.
std::vector<TrajectoryRow> ReadTrajectoryCsv(std::istream& in);

// Metrics object; an infinite min_d_obj (no obstacles) is written as null.
std::string MetricsJson(const SimulationSummary& summary);

// Writes speed.svg, acceleration.svg, steering.svg and path.svg into `dir`.
void WritePlots(const std::string& dir, const Scenario& scenario,
                const SimulationLog& log, const PlannerConfig& config);

// One row per planned step: the input applied and the state it leads to.
void WritePlanCsv(std::ostream& out, const PlannedTrajectory& plan,
                  double dt);

}  // namespace mppi

#endif  // MPPI_REPORT_H_
